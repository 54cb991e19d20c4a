#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "dataflow/types.hpp"

namespace pdsp {

// Parameter grid for workload generation. Defaults reproduce the documented
// benchmark ranges; every range can be replaced from a config file.
struct GeneratorConfig {
    std::uint64_t seed = 1;
    std::size_t count = 1;
    std::vector<std::string> structures = {"linear"}; // synthetic tags and/or application codes

    std::vector<std::int64_t> window_durations_ms = {50,   100,  150,  200,  250,  325,  750,
                                                     1000, 1500, 2000, 2500, 3000, 4000, 5000,
                                                     6000, 7000, 8000, 9000, 10000};
    std::vector<std::int64_t> window_lengths_tuples = {2,  3,  4,  5,  7,   10,  17,  25,  37,  50,
                                                       62, 75, 82, 100, 150, 200, 250, 300, 350, 400};
    std::vector<double> slide_ratios = {0.3, 0.4, 0.5, 0.6, 0.7};
    std::vector<AggFn> agg_functions = {AggFn::Min, AggFn::Max, AggFn::Avg, AggFn::Mean, AggFn::Sum};
    std::vector<double> event_rates = {10,     100,    1000,    5000,    10000,   50000,
                                       100000, 200000, 500000, 1000000, 2000000, 4000000};
    int min_tuple_width = 1;
    int max_tuple_width = 15;
    std::vector<ArrivalKind> arrivals = {ArrivalKind::Poisson, ArrivalKind::Uniform, ArrivalKind::Zipf};
    double zipf_skew = 1.1;
    int string_pool = 1000;
    int key_cardinality = 100;

    // Filter-literal rejection sampling: redraw the literal until the
    // estimated selectivity clears the floor, up to `rejection_budget` draws.
    double min_filter_selectivity = 0.01;
    std::size_t selectivity_sample = 2000;
    std::size_t rejection_budget = 100;

    // Sub-query index for multi-query applications; -1 randomizes per seed.
    int app_variant = -1;

    void validate() const;
};

GeneratorConfig generator_config_from_json(const nlohmann::json& j);
nlohmann::json generator_config_to_json(const GeneratorConfig& cfg);
GeneratorConfig load_generator_config(const std::string& path);

// Accepts "2-way join" and "2-way-join" alike; returns the canonical tag.
std::string normalize_structure_tag(const std::string& tag);

// One seeded plan for a synthetic structure; all parallelism 1.
QueryPlan generate_synthetic_plan(const std::string& structure_tag, const GeneratorConfig& cfg,
                                  std::uint64_t seed);

// One seeded plan from the application template registry (codes of Table 2);
// tunables randomized, parallelism left at 1.
QueryPlan instantiate_application(const std::string& code, const GeneratorConfig& cfg, std::uint64_t seed);

// Exactly cfg.count plans, round-robin over cfg.structures, deterministic in
// cfg.seed. Every plan passes validation.
std::vector<QueryPlan> generate_corpus(const GeneratorConfig& cfg);

} // namespace pdsp
