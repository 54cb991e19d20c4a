#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "corpus/store.hpp"
#include "enumerate/enumerate.hpp"
#include "exec/runner.hpp"
#include "ml/train.hpp"
#include "workload/generator.hpp"

namespace pdsp {

struct StrategyConfig {
    EnumerationStrategy strategy;
    std::size_t random_count = 1; // plans drawn per base under the unbounded Random strategy
    double per_core_capacity = 100000.0;
    double join_selectivity = 0.01;
};

// Whole-harness configuration: one file drives generate -> enumerate -> run ->
// store -> train -> evaluate. Every field has a default; the file round-trips
// losslessly through to_json/from_json.
struct HarnessConfig {
    std::string corpus_path = "corpus.jsonl";
    std::string results_dir = "results";
    std::string traces_dir = "traces";
    std::string cluster = "m510x10";

    GeneratorConfig generator;
    StrategyConfig strategy;

    ExecMode mode = ExecMode::Sim;
    CostModelParams cost;
    PlacementPolicy placement = PlacementPolicy::RoundRobin;
    int slots_per_core = 1;

    // measurement protocol: repetitions of the same run
    int protocol_runs = 3;
    double duration_s = 180.0; // virtual seconds per run; sim executes this instantly
    double time_scale = 0.01;  // thread mode wall-clock scaling
    std::size_t queue_capacity = 1024;
    bool vary_run_seeds = false;
    bool trace = false; // sim mode: dump event traces per executed plan

    SplitSpec split;
    TrainConfig train;
    std::vector<std::string> pipeline_models = {"lr", "mlp", "rf", "gnn"};
    std::vector<std::string> pipeline_compare = {"rule", "random"};

    nlohmann::json to_json() const;
    static HarnessConfig from_json(const nlohmann::json& j);
    static HarnessConfig from_file(const std::string& path);

    RunOptions run_options(std::uint64_t seed) const;
};

nlohmann::json split_spec_to_json(const SplitSpec& spec);
SplitSpec split_spec_from_json(const nlohmann::json& j);
nlohmann::json train_config_to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const nlohmann::json& j);
nlohmann::json strategy_config_to_json(const StrategyConfig& config);
StrategyConfig strategy_config_from_json(const nlohmann::json& j);

} // namespace pdsp
