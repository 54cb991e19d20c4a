#pragma once

#include "workload/generator.hpp"
#include "workload/stream.hpp"

namespace pdsp {

// Shared randomized building blocks for synthetic structures and the
// application templates.
namespace gen {

StreamSpec random_stream(const GeneratorConfig& cfg, Rng& rng, bool integer_key);

WindowSpec random_window(const GeneratorConfig& cfg, Rng& rng, bool time_only);

// Draws a filter over `stream` whose estimated selectivity clears
// cfg.min_filter_selectivity, rejection-sampling the literal. Throws
// Error(Generation) naming `op_id` when the budget is exhausted.
// exclude_field0 keeps filters off the conventional key field (join inputs
// must not carve disjoint key ranges on the two sides).
FilterSpec random_filter(const StreamSpec& stream, const GeneratorConfig& cfg, Rng& rng,
                         std::uint64_t sel_seed, const std::string& op_id,
                         bool exclude_field0 = false);

// Keyed aggregate over the given input schema; picks a numeric value field
// when one exists.
AggSpec random_agg(const TupleSchema& input, std::size_t key_field, const GeneratorConfig& cfg, Rng& rng);

} // namespace gen

} // namespace pdsp
