#include "harness/config.hpp"

#include <fstream>
#include <set>

namespace pdsp {

using nlohmann::json;

json split_spec_to_json(const SplitSpec& spec) {
    json j;
    j["train"] = spec.train_fraction;
    j["val"] = spec.val_fraction;
    j["test"] = spec.test_fraction;
    j["key"] = spec.key == SplitKey::ByRecord ? "by_record" : "by_plan_structure";
    j["seed"] = spec.seed;
    j["holdout_structures"] = spec.holdout_structures;
    return j;
}

SplitSpec split_spec_from_json(const json& j) {
    static const std::set<std::string> allowed = {"train", "val", "test", "key", "seed",
                                                  "holdout_structures"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) throw_invalid("unknown split key: " + it.key());
    SplitSpec spec;
    if (j.contains("train")) spec.train_fraction = j.at("train").get<double>();
    if (j.contains("val")) spec.val_fraction = j.at("val").get<double>();
    if (j.contains("test")) spec.test_fraction = j.at("test").get<double>();
    if (j.contains("key")) {
        auto key = j.at("key").get<std::string>();
        if (key == "by_record")
            spec.key = SplitKey::ByRecord;
        else if (key == "by_plan_structure")
            spec.key = SplitKey::ByPlanStructure;
        else
            throw_invalid("unknown split key kind: " + key);
    }
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("holdout_structures"))
        spec.holdout_structures = j.at("holdout_structures").get<std::vector<std::string>>();
    spec.validate();
    return spec;
}

json train_config_to_json(const TrainConfig& config) {
    json j;
    j["model"] = model_kind_name(config.kind);
    j["learning_rate"] = config.learning_rate;
    j["max_epochs"] = config.max_epochs;
    j["patience"] = config.patience;
    j["batch_size"] = config.batch_size;
    j["hidden"] = config.hidden;
    j["ridge_lambda"] = config.ridge_lambda;
    j["rf_trees"] = config.rf_trees;
    j["rf_max_depth"] = config.rf_max_depth;
    j["rf_bootstrap"] = config.rf_bootstrap;
    j["gnn_rounds"] = config.gnn_rounds;
    j["gnn_hidden"] = config.gnn_hidden;
    j["log_target"] = config.log_target;
    j["seed"] = config.seed;
    return j;
}

TrainConfig train_config_from_json(const json& j) {
    static const std::set<std::string> allowed = {
        "model",   "learning_rate", "max_epochs", "patience",   "batch_size", "hidden",
        "ridge_lambda", "rf_trees", "rf_max_depth", "rf_bootstrap", "gnn_rounds", "gnn_hidden",
        "log_target", "seed",
    };
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) throw_invalid("unknown train config key: " + it.key());
    TrainConfig c;
    if (j.contains("model")) c.kind = model_kind_from_name(j.at("model").get<std::string>());
    if (j.contains("learning_rate")) c.learning_rate = j.at("learning_rate").get<double>();
    if (j.contains("max_epochs")) c.max_epochs = j.at("max_epochs").get<int>();
    if (j.contains("patience")) c.patience = j.at("patience").get<int>();
    if (j.contains("batch_size")) c.batch_size = j.at("batch_size").get<int>();
    if (j.contains("hidden")) c.hidden = j.at("hidden").get<std::vector<int>>();
    if (j.contains("ridge_lambda")) c.ridge_lambda = j.at("ridge_lambda").get<double>();
    if (j.contains("rf_trees")) c.rf_trees = j.at("rf_trees").get<int>();
    if (j.contains("rf_max_depth")) c.rf_max_depth = j.at("rf_max_depth").get<int>();
    if (j.contains("rf_bootstrap")) c.rf_bootstrap = j.at("rf_bootstrap").get<bool>();
    if (j.contains("gnn_rounds")) c.gnn_rounds = j.at("gnn_rounds").get<int>();
    if (j.contains("gnn_hidden")) c.gnn_hidden = j.at("gnn_hidden").get<int>();
    if (j.contains("log_target")) c.log_target = j.at("log_target").get<bool>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    c.validate();
    return c;
}

json strategy_config_to_json(const StrategyConfig& config) {
    json j;
    j["strategy"] = strategy_kind_name(config.strategy.kind);
    j["degree_min"] = config.strategy.degree_min;
    j["degree_max"] = config.strategy.degree_max;
    json ranges = json::object();
    for (const auto& [op, range] : config.strategy.per_op_ranges)
        ranges[op] = {range.first, range.second};
    j["per_op_ranges"] = ranges;
    j["assignments"] = config.strategy.assignments;
    j["include_sources_sinks"] = config.strategy.include_sources_sinks;
    j["random_count"] = config.random_count;
    j["per_core_capacity"] = config.per_core_capacity;
    j["join_selectivity"] = config.join_selectivity;
    return j;
}

StrategyConfig strategy_config_from_json(const json& j) {
    static const std::set<std::string> allowed = {
        "strategy",     "degree_min",       "degree_max",        "per_op_ranges", "assignments",
        "include_sources_sinks", "random_count", "per_core_capacity", "join_selectivity",
    };
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) throw_invalid("unknown strategy config key: " + it.key());
    StrategyConfig c;
    if (j.contains("strategy"))
        c.strategy.kind = strategy_kind_from_name(j.at("strategy").get<std::string>());
    if (j.contains("degree_min")) c.strategy.degree_min = j.at("degree_min").get<int>();
    if (j.contains("degree_max")) c.strategy.degree_max = j.at("degree_max").get<int>();
    if (j.contains("per_op_ranges"))
        for (auto it = j.at("per_op_ranges").begin(); it != j.at("per_op_ranges").end(); ++it) {
            auto pair = it.value().get<std::vector<int>>();
            if (pair.size() != 2) throw_invalid("per-op range must be [min, max]");
            c.strategy.per_op_ranges[it.key()] = {pair[0], pair[1]};
        }
    if (j.contains("assignments"))
        c.strategy.assignments = j.at("assignments").get<std::map<std::string, int>>();
    if (j.contains("include_sources_sinks"))
        c.strategy.include_sources_sinks = j.at("include_sources_sinks").get<bool>();
    if (j.contains("random_count")) c.random_count = j.at("random_count").get<std::size_t>();
    if (j.contains("per_core_capacity")) c.per_core_capacity = j.at("per_core_capacity").get<double>();
    if (j.contains("join_selectivity")) c.join_selectivity = j.at("join_selectivity").get<double>();
    c.strategy.validate();
    if (c.random_count < 1) throw_invalid("random_count must be >= 1");
    if (c.per_core_capacity <= 0) throw_invalid("per_core_capacity must be positive");
    return c;
}

json HarnessConfig::to_json() const {
    json j;
    j["corpus_path"] = corpus_path;
    j["results_dir"] = results_dir;
    j["traces_dir"] = traces_dir;
    j["cluster"] = cluster;
    j["generator"] = generator_config_to_json(generator);
    j["strategy"] = strategy_config_to_json(strategy);
    j["mode"] = exec_mode_name(mode);
    j["cost"] = cost_params_to_json(cost);
    j["placement"] = placement_policy_name(placement);
    j["slots_per_core"] = slots_per_core;
    j["protocol_runs"] = protocol_runs;
    j["duration_s"] = duration_s;
    j["time_scale"] = time_scale;
    j["queue_capacity"] = queue_capacity;
    j["vary_run_seeds"] = vary_run_seeds;
    j["trace"] = trace;
    j["split"] = split_spec_to_json(split);
    j["train"] = train_config_to_json(train);
    j["pipeline_models"] = pipeline_models;
    j["pipeline_compare"] = pipeline_compare;
    return j;
}

HarnessConfig HarnessConfig::from_json(const json& j) {
    static const std::set<std::string> allowed = {
        "corpus_path", "results_dir", "traces_dir", "cluster", "generator", "strategy", "mode",
        "cost", "placement", "slots_per_core", "protocol_runs", "duration_s", "time_scale",
        "queue_capacity", "vary_run_seeds", "trace", "split", "train", "pipeline_models", "pipeline_compare",
    };
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) throw_invalid("unknown harness config key: " + it.key());
    HarnessConfig c;
    if (j.contains("corpus_path")) c.corpus_path = j.at("corpus_path").get<std::string>();
    if (j.contains("results_dir")) c.results_dir = j.at("results_dir").get<std::string>();
    if (j.contains("traces_dir")) c.traces_dir = j.at("traces_dir").get<std::string>();
    if (j.contains("cluster")) c.cluster = j.at("cluster").get<std::string>();
    if (j.contains("generator")) c.generator = generator_config_from_json(j.at("generator"));
    if (j.contains("strategy")) c.strategy = strategy_config_from_json(j.at("strategy"));
    if (j.contains("mode")) c.mode = exec_mode_from_name(j.at("mode").get<std::string>());
    if (j.contains("cost")) c.cost = cost_params_from_json(j.at("cost"));
    if (j.contains("placement"))
        c.placement = placement_policy_from_name(j.at("placement").get<std::string>());
    if (j.contains("slots_per_core")) c.slots_per_core = j.at("slots_per_core").get<int>();
    if (j.contains("protocol_runs")) c.protocol_runs = j.at("protocol_runs").get<int>();
    if (j.contains("duration_s")) c.duration_s = j.at("duration_s").get<double>();
    if (j.contains("time_scale")) c.time_scale = j.at("time_scale").get<double>();
    if (j.contains("queue_capacity")) c.queue_capacity = j.at("queue_capacity").get<std::size_t>();
    if (j.contains("vary_run_seeds")) c.vary_run_seeds = j.at("vary_run_seeds").get<bool>();
    if (j.contains("trace")) c.trace = j.at("trace").get<bool>();
    if (j.contains("split")) c.split = split_spec_from_json(j.at("split"));
    if (j.contains("train")) c.train = train_config_from_json(j.at("train"));
    if (j.contains("pipeline_models"))
        c.pipeline_models = j.at("pipeline_models").get<std::vector<std::string>>();
    if (j.contains("pipeline_compare"))
        c.pipeline_compare = j.at("pipeline_compare").get<std::vector<std::string>>();
    if (c.protocol_runs < 1) throw_invalid("protocol_runs must be >= 1");
    if (c.duration_s <= 0) throw_invalid("duration_s must be positive");
    for (const auto& m : c.pipeline_models) model_kind_from_name(m);
    for (const auto& s : c.pipeline_compare) strategy_kind_from_name(s);
    return c;
}

HarnessConfig HarnessConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw_io("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw_invalid("malformed config " + path + ": " + e.what());
    }
    return from_json(j);
}

RunOptions HarnessConfig::run_options(std::uint64_t seed) const {
    RunOptions opt;
    opt.duration_us = duration_s * 1e6;
    opt.seed = seed;
    opt.placement = placement;
    opt.slots_per_core = slots_per_core;
    opt.time_scale = time_scale;
    opt.queue_capacity = queue_capacity;
    return opt;
}

} // namespace pdsp
