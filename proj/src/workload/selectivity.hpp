#pragma once

#include "dataflow/types.hpp"
#include "workload/stream.hpp"

namespace pdsp {

struct SelectivityEstimate {
    double value = 0.0;       // fraction of sampled tuples passing the filter
    std::size_t sample_size = 0;
};

// Pass rate of `filter` over a seeded sample drawn from `stream`.
// Deterministic for fixed (filter, stream, seed, sample_size).
SelectivityEstimate estimate_selectivity(const FilterSpec& filter, const StreamSpec& stream,
                                         std::uint64_t seed, std::size_t sample_size);

} // namespace pdsp
