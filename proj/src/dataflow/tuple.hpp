#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dataflow/types.hpp"
#include "util/rng.hpp"

namespace pdsp {

// In-flight data item. event_ts is the event-time position (microseconds);
// production_ts is the earliest contributing source production instant and
// carries end-to-end latency lineage through windows and joins.
struct Tuple {
    std::vector<Value> values;
    double event_ts = 0.0;
    double production_ts = 0.0;
};

// Wire size for the bandwidth term: 8 bytes per numeric field plus string length.
std::size_t tuple_wire_bytes(const Tuple& t);

// Total order on values of equal type (used for canonical tie-breaks).
int compare_values(const Value& a, const Value& b);

std::uint64_t hash_value(const Value& v);

// Canonical text form used for digests and brute-force multiset comparison.
std::string tuple_canonical(const Tuple& t);

// Applies one filter predicate; throws on type mismatch between the filter
// and the tuple field.
bool filter_matches(const FilterSpec& filter, const Tuple& t);

// Checks filter/schema compatibility without evaluating.
// Returns an error message, or empty when applicable.
std::string filter_applicability(const FilterSpec& filter, const TupleSchema& schema);

double value_as_double(const Value& v);

} // namespace pdsp
