#pragma once

// Brute-force single-pass reference evaluator: computes the expected sink
// output multiset of a plan directly from the logical definition (global
// per-key grouping, window membership by arithmetic, nested-loop joins).
// Deliberately shares no code with the engine's operator logic; it is the
// independent oracle the engine is checked against.

#include <string>
#include <vector>

#include "dataflow/types.hpp"

namespace pdsp::reference {

// Canonical forms of the tuples the sink should receive, unsorted.
// seed/duration_us follow the engine's run contract (per-source seeds are
// derived the same way).
std::vector<std::string> expected_sink_outputs(const QueryPlan& plan, std::uint64_t seed,
                                               double duration_us);

} // namespace pdsp::reference
