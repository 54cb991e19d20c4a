#include "ml/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "ml/features.hpp"
#include "ml/linalg.hpp"

namespace pdsp {

const char* kEvalCsvHeader = "model,structure,n,q50,q95,qmax,train_seconds";
const char* kCompareCsvHeader = "strategy,records,train_seconds,q50,q95,qmax";

const char* model_kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::LR: return "lr";
        case ModelKind::MLP: return "mlp";
        case ModelKind::RF: return "rf";
        case ModelKind::GNN: return "gnn";
        case ModelKind::MeanBaseline: return "mean_baseline";
    }
    return "?";
}

ModelKind model_kind_from_name(const std::string& name) {
    if (name == "lr") return ModelKind::LR;
    if (name == "mlp") return ModelKind::MLP;
    if (name == "rf") return ModelKind::RF;
    if (name == "gnn") return ModelKind::GNN;
    if (name == "mean_baseline") return ModelKind::MeanBaseline;
    throw_invalid("unknown model kind: " + name);
}

void TrainConfig::validate() const {
    if (learning_rate <= 0) throw_invalid("learning rate must be positive");
    if (max_epochs < 1 || patience < 1 || batch_size < 1) throw_invalid("bad training hyperparameters");
    if (rf_trees < 1 || gnn_rounds < 1 || gnn_hidden < 1) throw_invalid("bad model hyperparameters");
    for (int h : hidden)
        if (h < 1) throw_invalid("hidden sizes must be positive");
    if (ridge_lambda < 0) throw_invalid("ridge lambda must be >= 0");
}

namespace {

double transform_target(double latency_us, bool log_target) {
    return log_target ? std::log(latency_us) : latency_us;
}

double untransform(double y, bool log_target) {
    if (log_target) return std::exp(y);
    return std::max(y, 1e-6);
}

struct Normalizer {
    std::vector<double> mean;
    std::vector<double> std;

    static Normalizer fit(const std::vector<std::vector<double>>& rows) {
        if (rows.empty()) throw_invalid("cannot fit normalizer on empty data");
        std::size_t d = rows[0].size();
        Normalizer n;
        n.mean.assign(d, 0.0);
        n.std.assign(d, 0.0);
        for (const auto& r : rows)
            for (std::size_t i = 0; i < d; ++i) n.mean[i] += r[i];
        for (auto& m : n.mean) m /= static_cast<double>(rows.size());
        for (const auto& r : rows)
            for (std::size_t i = 0; i < d; ++i) n.std[i] += (r[i] - n.mean[i]) * (r[i] - n.mean[i]);
        for (auto& s : n.std) {
            s = std::sqrt(s / static_cast<double>(rows.size()));
            if (s < 1e-12) s = 1.0; // constant feature
        }
        return n;
    }

    void apply(std::vector<double>& row) const {
        for (std::size_t i = 0; i < row.size(); ++i) row[i] = (row[i] - mean[i]) / std[i];
    }
};

void check_finite(double loss) {
    if (!std::isfinite(loss))
        throw Error(ErrorCode::Training, "training loss became non-finite (NaN/Inf); check the "
                                         "learning rate and target transform");
}

// Early stopping: strictly-decreasing validation loss counts as improvement;
// best-epoch parameters are restored at the end.
template <class Model, class BatchLoss, class ValLoss>
void fit_iterative(Model& model, const TrainConfig& config, std::size_t n_train, BatchLoss batch_loss,
                   ValLoss val_loss, TrainedModel& out) {
    auto params = model.params();
    AdamState adam(params.size(), config.learning_rate);
    Rng shuffle_rng(mix_seed(config.seed, 5));

    std::vector<std::size_t> order(n_train);
    std::iota(order.begin(), order.end(), 0);

    double best_val = std::numeric_limits<double>::infinity();
    std::vector<double> best_params = params;
    int best_epoch = 0;
    int epoch = 0;
    std::vector<double> grad;

    for (epoch = 1; epoch <= config.max_epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double train_loss_sum = 0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < n_train; start += static_cast<std::size_t>(config.batch_size)) {
            std::size_t end = std::min(n_train, start + static_cast<std::size_t>(config.batch_size));
            std::vector<std::size_t> batch(order.begin() + static_cast<std::ptrdiff_t>(start),
                                           order.begin() + static_cast<std::ptrdiff_t>(end));
            double loss = batch_loss(model, batch, grad);
            check_finite(loss);
            adam.step(params, grad);
            model.set_params(params);
            train_loss_sum += loss;
            ++batches;
        }
        double epoch_train = train_loss_sum / static_cast<double>(batches);
        double epoch_val = val_loss(model);
        check_finite(epoch_val);
        out.train_curve.push_back(epoch_train);
        out.val_curve.push_back(epoch_val);

        if (epoch_val < best_val) {
            best_val = epoch_val;
            best_params = params;
            best_epoch = epoch;
        } else if (epoch - best_epoch >= config.patience) {
            break;
        }
    }
    model.set_params(best_params);
    out.best_epoch = best_epoch;
    out.stopped_epoch = std::min(epoch, config.max_epochs);
}

} // namespace

TrainedModel train(const std::vector<RunRecord>& records, const Split& split, const TrainConfig& config) {
    config.validate();
    if (split.train.size() < 10)
        throw Error(ErrorCode::Training,
                    "training requires at least 10 records, got " + std::to_string(split.train.size()));
    auto started = std::chrono::steady_clock::now();

    TrainedModel model;
    model.kind = config.kind;
    model.log_target = config.log_target;

    auto target = [&](std::size_t i) {
        return transform_target(records[i].latency_label_us, config.log_target);
    };

    if (config.kind == ModelKind::GNN) {
        std::vector<PlanGraph> graphs(records.size());
        for (std::size_t i = 0; i < records.size(); ++i) graphs[i] = featurize_graph(records[i]);

        // node-level normalization from train-split nodes only
        std::vector<std::vector<double>> train_nodes;
        for (std::size_t i : split.train)
            for (const auto& f : graphs[i].node_features) train_nodes.push_back(f);
        auto norm = Normalizer::fit(train_nodes);
        model.node_feature_mean = norm.mean;
        model.node_feature_std = norm.std;
        for (auto& g : graphs)
            for (auto& f : g.node_features) norm.apply(f);

        Rng init_rng(mix_seed(config.seed, 6));
        model.gnn = Gnn(static_cast<int>(node_feature_names().size()), config.gnn_hidden,
                        config.gnn_rounds, init_rng);

        std::vector<double> y(records.size());
        for (std::size_t i = 0; i < records.size(); ++i) y[i] = target(i);
        // center the target on the train mean; the net learns residuals
        double y_mean = 0;
        for (std::size_t i : split.train) y_mean += y[i];
        y_mean /= static_cast<double>(split.train.size());
        model.target_offset = y_mean;
        for (auto& v : y) v -= y_mean;

        auto batch_loss = [&](Gnn& g, const std::vector<std::size_t>& batch,
                              std::vector<double>& grad) {
            std::vector<PlanGraph> xs;
            std::vector<double> ys;
            for (std::size_t k : batch) {
                xs.push_back(graphs[split.train[k]]);
                ys.push_back(y[split.train[k]]);
            }
            return g.loss_and_grad(xs, ys, grad);
        };
        auto val_loss = [&](const Gnn& g) {
            double loss = 0;
            for (std::size_t i : split.val) {
                double err = g.forward(graphs[i]) - y[i];
                loss += 0.5 * err * err;
            }
            return loss / static_cast<double>(split.val.size());
        };
        fit_iterative(model.gnn, config, split.train.size(), batch_loss, val_loss, model);
    } else {
        std::vector<std::vector<double>> features(records.size());
        for (std::size_t i = 0; i < records.size(); ++i) features[i] = featurize_flat(records[i]);

        std::vector<std::vector<double>> train_rows;
        for (std::size_t i : split.train) train_rows.push_back(features[i]);
        auto norm = Normalizer::fit(train_rows);
        model.feature_mean = norm.mean;
        model.feature_std = norm.std;
        for (auto& f : features) norm.apply(f);

        std::vector<double> y(records.size());
        for (std::size_t i = 0; i < records.size(); ++i) y[i] = target(i);

        switch (config.kind) {
            case ModelKind::MeanBaseline: {
                double sum = 0;
                for (std::size_t i : split.train) sum += records[i].latency_label_us;
                // predicts the train-label mean in latency space
                model.target_offset = sum / static_cast<double>(split.train.size());
                model.stopped_epoch = 0;
                break;
            }
            case ModelKind::LR: {
                // ridge on centered targets; the intercept is not penalized
                double y_mean = 0;
                for (std::size_t i : split.train) y_mean += y[i];
                y_mean /= static_cast<double>(split.train.size());
                model.target_offset = y_mean;

                const std::size_t d = flat_feature_names().size();
                Matrix x(split.train.size(), d);
                std::vector<double> rhs(d, 0.0);
                for (std::size_t r = 0; r < split.train.size(); ++r)
                    for (std::size_t c = 0; c < d; ++c) x.at(r, c) = features[split.train[r]][c];
                Matrix xtx = matmul(transpose(x), x);
                for (std::size_t c = 0; c < d; ++c) xtx.at(c, c) += config.ridge_lambda;
                for (std::size_t r = 0; r < split.train.size(); ++r)
                    for (std::size_t c = 0; c < d; ++c)
                        rhs[c] += x.at(r, c) * (y[split.train[r]] - y_mean);
                model.lr_weights = solve_linear(xtx, rhs);
                break;
            }
            case ModelKind::RF: {
                ForestConfig fc;
                fc.trees = config.rf_trees;
                fc.max_depth = config.rf_max_depth;
                fc.bootstrap = config.rf_bootstrap;
                std::vector<std::vector<double>> xs;
                std::vector<double> ys;
                for (std::size_t i : split.train) {
                    xs.push_back(features[i]);
                    ys.push_back(y[i]);
                }
                model.forest = Forest::fit(xs, ys, fc, mix_seed(config.seed, 7));
                break;
            }
            case ModelKind::MLP: {
                double y_mean = 0;
                for (std::size_t i : split.train) y_mean += y[i];
                y_mean /= static_cast<double>(split.train.size());
                model.target_offset = y_mean;
                for (auto& v : y) v -= y_mean;

                std::vector<int> sizes;
                sizes.push_back(static_cast<int>(flat_feature_names().size()));
                for (int h : config.hidden) sizes.push_back(h);
                sizes.push_back(1);
                Rng init_rng(mix_seed(config.seed, 6));
                model.mlp = Mlp(sizes, init_rng);

                auto batch_loss = [&](Mlp& m, const std::vector<std::size_t>& batch,
                                      std::vector<double>& grad) {
                    std::vector<std::vector<double>> xs;
                    std::vector<double> ys;
                    for (std::size_t k : batch) {
                        xs.push_back(features[split.train[k]]);
                        ys.push_back(y[split.train[k]]);
                    }
                    return m.loss_and_grad(xs, ys, grad);
                };
                auto val_loss = [&](const Mlp& m) {
                    double loss = 0;
                    for (std::size_t i : split.val) {
                        double err = m.forward(features[i]) - y[i];
                        loss += 0.5 * err * err;
                    }
                    return loss / static_cast<double>(split.val.size());
                };
                fit_iterative(model.mlp, config, split.train.size(), batch_loss, val_loss, model);
                break;
            }
            case ModelKind::GNN:
                break; // handled above
        }
    }

    model.train_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return model;
}

double predict(const TrainedModel& model, const RunRecord& record) {
    switch (model.kind) {
        case ModelKind::MeanBaseline:
            return model.target_offset;
        case ModelKind::GNN: {
            auto graph = featurize_graph(record);
            for (auto& f : graph.node_features)
                for (std::size_t i = 0; i < f.size(); ++i)
                    f[i] = (f[i] - model.node_feature_mean[i]) / model.node_feature_std[i];
            return untransform(model.target_offset + model.gnn.forward(graph), model.log_target);
        }
        default: {
            auto f = featurize_flat(record);
            for (std::size_t i = 0; i < f.size(); ++i)
                f[i] = (f[i] - model.feature_mean[i]) / model.feature_std[i];
            if (model.kind == ModelKind::LR) {
                double y = model.target_offset;
                for (std::size_t i = 0; i < f.size(); ++i) y += model.lr_weights[i] * f[i];
                return untransform(y, model.log_target);
            }
            if (model.kind == ModelKind::RF) return untransform(model.forest.predict(f), model.log_target);
            return untransform(model.target_offset + model.mlp.forward(f), model.log_target);
        }
    }
}

EvaluationReport evaluate(const TrainedModel& model, const std::vector<RunRecord>& records,
                          const std::vector<std::size_t>& subset) {
    if (subset.empty()) throw_invalid("evaluation requires a non-empty record set");
    std::vector<std::pair<double, double>> all_pairs;
    std::map<std::string, std::vector<std::pair<double, double>>> grouped;
    for (std::size_t i : subset) {
        double truth = records[i].latency_label_us;
        double pred = predict(model, records[i]);
        all_pairs.push_back({truth, pred});
        grouped[records[i].plan.structure_tag].push_back({truth, pred});
    }
    EvaluationReport report;
    report.overall = q_error_report(all_pairs);
    for (const auto& [structure, pairs] : grouped)
        report.by_structure.push_back(EvaluationRow{structure, q_error_report(pairs)});
    return report;
}

std::string evaluation_to_csv(const TrainedModel& model, const EvaluationReport& report) {
    std::ostringstream os;
    os << kEvalCsvHeader << '\n';
    auto row = [&](const std::string& structure, const QErrorReport& q) {
        os << model_kind_name(model.kind) << ',' << structure << ',' << q.count << ',' << q.median
           << ',' << q.p95 << ',' << q.max << ',' << model.train_seconds << '\n';
    };
    row("all", report.overall);
    for (const auto& r : report.by_structure) row(r.structure, r.qerror);
    return os.str();
}

std::vector<StrategyComparisonRow> compare_enumeration_training(
    const std::vector<std::pair<std::string, std::vector<RunRecord>>>& corpora_by_strategy,
    const TrainConfig& config, const SplitSpec& split_spec) {
    if (corpora_by_strategy.size() < 2)
        throw_invalid("strategy comparison needs at least two corpora");
    std::vector<StrategyComparisonRow> rows;
    for (const auto& [strategy, records] : corpora_by_strategy) {
        try {
            auto split = split_records(records, split_spec);
            auto model = train(records, split, config);
            auto report = evaluate(model, records, split.test);
            rows.push_back(StrategyComparisonRow{strategy, records.size(), model.train_seconds,
                                                 report.overall});
        } catch (const Error& e) {
            throw Error(e.code(), "strategy '" + strategy + "': " + e.what());
        }
    }
    return rows;
}

std::string comparison_to_csv(const std::vector<StrategyComparisonRow>& rows) {
    std::ostringstream os;
    os << kCompareCsvHeader << '\n';
    for (const auto& r : rows)
        os << r.strategy << ',' << r.records << ',' << r.train_seconds << ',' << r.test_qerror.median
           << ',' << r.test_qerror.p95 << ',' << r.test_qerror.max << '\n';
    return os.str();
}

nlohmann::json TrainedModel::to_json() const {
    nlohmann::json j;
    j["format_version"] = 1;
    j["kind"] = model_kind_name(kind);
    j["feature_version"] = feature_version;
    j["log_target"] = log_target;
    j["feature_mean"] = feature_mean;
    j["feature_std"] = feature_std;
    j["node_feature_mean"] = node_feature_mean;
    j["node_feature_std"] = node_feature_std;
    j["target_offset"] = target_offset;
    j["lr_weights"] = lr_weights;
    if (kind == ModelKind::MLP) j["mlp"] = mlp.to_json();
    if (kind == ModelKind::RF) j["forest"] = forest.to_json();
    if (kind == ModelKind::GNN) j["gnn"] = gnn.to_json();
    j["train_curve"] = train_curve;
    j["val_curve"] = val_curve;
    j["best_epoch"] = best_epoch;
    j["stopped_epoch"] = stopped_epoch;
    j["train_seconds"] = train_seconds;
    return j;
}

TrainedModel TrainedModel::from_json(const nlohmann::json& j) {
    if (j.at("format_version").get<int>() != 1)
        throw_invalid("unsupported model format version");
    TrainedModel m;
    m.kind = model_kind_from_name(j.at("kind").get<std::string>());
    m.feature_version = j.at("feature_version").get<int>();
    if (m.feature_version != kFeatureVersion)
        throw_invalid("model feature version " + std::to_string(m.feature_version) +
                      " does not match harness feature version " + std::to_string(kFeatureVersion));
    m.log_target = j.at("log_target").get<bool>();
    m.feature_mean = j.at("feature_mean").get<std::vector<double>>();
    m.feature_std = j.at("feature_std").get<std::vector<double>>();
    m.node_feature_mean = j.at("node_feature_mean").get<std::vector<double>>();
    m.node_feature_std = j.at("node_feature_std").get<std::vector<double>>();
    m.target_offset = j.at("target_offset").get<double>();
    m.lr_weights = j.at("lr_weights").get<std::vector<double>>();
    if (j.contains("mlp")) m.mlp = Mlp::from_json(j.at("mlp"));
    if (j.contains("forest")) m.forest = Forest::from_json(j.at("forest"));
    if (j.contains("gnn")) m.gnn = Gnn::from_json(j.at("gnn"));
    m.train_curve = j.at("train_curve").get<std::vector<double>>();
    m.val_curve = j.at("val_curve").get<std::vector<double>>();
    m.best_epoch = j.at("best_epoch").get<int>();
    m.stopped_epoch = j.at("stopped_epoch").get<int>();
    m.train_seconds = j.at("train_seconds").get<double>();
    return m;
}

void TrainedModel::save(const std::string& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw_io("cannot write model file: " + path);
    out << to_json().dump() << '\n';
    if (!out) throw_io("model write failed: " + path);
}

TrainedModel TrainedModel::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw_io("cannot open model file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw_invalid("malformed model file " + path + ": " + e.what());
    }
    return from_json(j);
}

} // namespace pdsp
