#pragma once

#include <optional>
#include <string>
#include <vector>

#include "corpus/store.hpp"
#include "metrics/metrics.hpp"
#include "ml/gnn.hpp"
#include "ml/mlp.hpp"
#include "ml/rf.hpp"

namespace pdsp {

enum class ModelKind { LR, MLP, RF, GNN, MeanBaseline };

const char* model_kind_name(ModelKind k);
ModelKind model_kind_from_name(const std::string& name);

struct TrainConfig {
    ModelKind kind = ModelKind::LR;
    double learning_rate = 1e-3; // adaptive-moment mini-batch gradient descent
    int max_epochs = 500;
    int patience = 100; // epochs without val-loss improvement before stopping
    int batch_size = 32;
    std::vector<int> hidden = {64, 64}; // MLP
    double ridge_lambda = 1e-3;         // LR
    int rf_trees = 100;
    int rf_max_depth = 12;
    bool rf_bootstrap = true;
    int gnn_rounds = 3;
    int gnn_hidden = 64;
    bool log_target = true; // fit log-latency; multiplicative errors become additive
    std::uint64_t seed = 1;

    void validate() const;
};

struct TrainedModel {
    ModelKind kind = ModelKind::LR;
    int feature_version = kFeatureVersion;
    bool log_target = true;

    // z-score statistics fitted on the train split only
    std::vector<double> feature_mean, feature_std;           // flat models
    std::vector<double> node_feature_mean, node_feature_std; // GNN

    std::vector<double> lr_weights; // LR coefficients over normalized features
    double target_offset = 0;       // LR/baseline: train-target mean
    Mlp mlp;
    Forest forest;
    Gnn gnn;

    std::vector<double> train_curve, val_curve; // per-epoch losses
    int best_epoch = 0;
    int stopped_epoch = 0;
    double train_seconds = 0;

    nlohmann::json to_json() const;
    static TrainedModel from_json(const nlohmann::json& j);
    void save(const std::string& path) const;
    static TrainedModel load(const std::string& path);
};

TrainedModel train(const std::vector<RunRecord>& records, const Split& split, const TrainConfig& config);

// Predicted latency in microseconds; strictly positive, finite.
double predict(const TrainedModel& model, const RunRecord& record);

struct EvaluationRow {
    std::string structure; // "all" for the overall row
    QErrorReport qerror;
};

struct EvaluationReport {
    QErrorReport overall;
    std::vector<EvaluationRow> by_structure; // sorted by structure tag
};

EvaluationReport evaluate(const TrainedModel& model, const std::vector<RunRecord>& records,
                          const std::vector<std::size_t>& subset);

// CSV schema: model,structure,n,q50,q95,qmax,train_seconds
extern const char* kEvalCsvHeader;
std::string evaluation_to_csv(const TrainedModel& model, const EvaluationReport& report);

struct StrategyComparisonRow {
    std::string strategy;
    std::size_t records = 0;
    double train_seconds = 0;
    QErrorReport test_qerror;
};

// Trains one identical model config per strategy-tagged corpus and reports
// accuracy vs corpus size vs training wall time.
std::vector<StrategyComparisonRow> compare_enumeration_training(
    const std::vector<std::pair<std::string, std::vector<RunRecord>>>& corpora_by_strategy,
    const TrainConfig& config, const SplitSpec& split_spec);

extern const char* kCompareCsvHeader;
std::string comparison_to_csv(const std::vector<StrategyComparisonRow>& rows);

} // namespace pdsp
