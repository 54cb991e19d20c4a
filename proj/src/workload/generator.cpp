#include "workload/generator.hpp"

#include <fstream>
#include <set>

#include "dataflow/validate.hpp"
#include "workload/applications.hpp"
#include "workload/synthetic.hpp"

namespace pdsp {

using nlohmann::json;

void GeneratorConfig::validate() const {
    auto non_empty = [](const auto& v, const char* what) {
        if (v.empty()) throw_invalid(std::string("generator config: empty range for ") + what);
    };
    non_empty(structures, "structures");
    non_empty(window_durations_ms, "window durations");
    non_empty(window_lengths_tuples, "window lengths");
    non_empty(slide_ratios, "slide ratios");
    non_empty(agg_functions, "aggregate functions");
    non_empty(event_rates, "event rates");
    non_empty(arrivals, "arrivals");
    if (min_tuple_width < 1 || max_tuple_width < min_tuple_width)
        throw_invalid("generator config: bad tuple width range");
    if (min_filter_selectivity < 0.0 || min_filter_selectivity >= 1.0)
        throw_invalid("generator config: selectivity floor must be in [0, 1)");
    if (selectivity_sample < 1) throw_invalid("generator config: selectivity sample must be >= 1");
    if (rejection_budget < 1) throw_invalid("generator config: rejection budget must be >= 1");
    for (const auto& s : structures) {
        auto tag = normalize_structure_tag(s);
        if (!is_synthetic_structure(tag) && !is_application_code(tag))
            throw_invalid("generator config: unknown structure '" + s + "'");
    }
    for (double r : event_rates)
        if (r <= 0) throw_invalid("generator config: event rates must be positive");
}

json generator_config_to_json(const GeneratorConfig& cfg) {
    json j;
    j["seed"] = cfg.seed;
    j["count"] = cfg.count;
    j["structures"] = cfg.structures;
    j["window_durations_ms"] = cfg.window_durations_ms;
    j["window_lengths_tuples"] = cfg.window_lengths_tuples;
    j["slide_ratios"] = cfg.slide_ratios;
    json fns = json::array();
    for (auto f : cfg.agg_functions) fns.push_back(agg_fn_name(f));
    j["agg_functions"] = fns;
    j["event_rates"] = cfg.event_rates;
    j["min_tuple_width"] = cfg.min_tuple_width;
    j["max_tuple_width"] = cfg.max_tuple_width;
    json arr = json::array();
    for (auto a : cfg.arrivals) arr.push_back(arrival_kind_name(a));
    j["arrivals"] = arr;
    j["zipf_skew"] = cfg.zipf_skew;
    j["string_pool"] = cfg.string_pool;
    j["key_cardinality"] = cfg.key_cardinality;
    j["min_filter_selectivity"] = cfg.min_filter_selectivity;
    j["selectivity_sample"] = cfg.selectivity_sample;
    j["rejection_budget"] = cfg.rejection_budget;
    j["app_variant"] = cfg.app_variant;
    return j;
}

GeneratorConfig generator_config_from_json(const json& j) {
    GeneratorConfig cfg;
    static const std::set<std::string> allowed = {
        "seed",          "count",          "structures",        "window_durations_ms",
        "window_lengths_tuples", "slide_ratios", "agg_functions", "event_rates",
        "min_tuple_width", "max_tuple_width", "arrivals",        "zipf_skew",
        "string_pool",   "key_cardinality", "min_filter_selectivity", "selectivity_sample",
        "rejection_budget", "app_variant",
    };
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) throw_invalid("unknown generator config key: " + it.key());

    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("count")) cfg.count = j.at("count").get<std::size_t>();
    if (j.contains("structures")) cfg.structures = j.at("structures").get<std::vector<std::string>>();
    if (j.contains("window_durations_ms"))
        cfg.window_durations_ms = j.at("window_durations_ms").get<std::vector<std::int64_t>>();
    if (j.contains("window_lengths_tuples"))
        cfg.window_lengths_tuples = j.at("window_lengths_tuples").get<std::vector<std::int64_t>>();
    if (j.contains("slide_ratios")) cfg.slide_ratios = j.at("slide_ratios").get<std::vector<double>>();
    if (j.contains("agg_functions")) {
        cfg.agg_functions.clear();
        for (const auto& f : j.at("agg_functions"))
            cfg.agg_functions.push_back(agg_fn_from_name(f.get<std::string>()));
    }
    if (j.contains("event_rates")) cfg.event_rates = j.at("event_rates").get<std::vector<double>>();
    if (j.contains("min_tuple_width")) cfg.min_tuple_width = j.at("min_tuple_width").get<int>();
    if (j.contains("max_tuple_width")) cfg.max_tuple_width = j.at("max_tuple_width").get<int>();
    if (j.contains("arrivals")) {
        cfg.arrivals.clear();
        for (const auto& a : j.at("arrivals"))
            cfg.arrivals.push_back(arrival_kind_from_name(a.get<std::string>()));
    }
    if (j.contains("zipf_skew")) cfg.zipf_skew = j.at("zipf_skew").get<double>();
    if (j.contains("string_pool")) cfg.string_pool = j.at("string_pool").get<int>();
    if (j.contains("key_cardinality")) cfg.key_cardinality = j.at("key_cardinality").get<int>();
    if (j.contains("min_filter_selectivity"))
        cfg.min_filter_selectivity = j.at("min_filter_selectivity").get<double>();
    if (j.contains("selectivity_sample"))
        cfg.selectivity_sample = j.at("selectivity_sample").get<std::size_t>();
    if (j.contains("rejection_budget")) cfg.rejection_budget = j.at("rejection_budget").get<std::size_t>();
    if (j.contains("app_variant")) cfg.app_variant = j.at("app_variant").get<int>();
    cfg.validate();
    return cfg;
}

GeneratorConfig load_generator_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw_io("cannot open generator config: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw_invalid("malformed generator config " + path + ": " + e.what());
    }
    return generator_config_from_json(j);
}

std::vector<QueryPlan> generate_corpus(const GeneratorConfig& cfg) {
    cfg.validate();
    std::vector<QueryPlan> plans;
    plans.reserve(cfg.count);
    for (std::size_t i = 0; i < cfg.count; ++i) {
        const std::string raw = cfg.structures[i % cfg.structures.size()];
        const std::string tag = normalize_structure_tag(raw);
        std::uint64_t plan_seed = mix_seed(cfg.seed, i);
        try {
            QueryPlan plan = is_synthetic_structure(tag)
                                 ? generate_synthetic_plan(tag, cfg, plan_seed)
                                 : instantiate_application(tag, cfg, plan_seed);
            plan.id = tag + "-" + std::to_string(cfg.seed) + "-" + std::to_string(i);
            plans.push_back(std::move(plan));
        } catch (const Error& e) {
            throw Error(e.code(),
                        "plan " + std::to_string(i) + " (" + tag + "): " + e.what());
        }
    }
    return plans;
}

} // namespace pdsp
