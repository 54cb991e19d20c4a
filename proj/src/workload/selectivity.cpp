#include "workload/selectivity.hpp"

#include "dataflow/tuple.hpp"

namespace pdsp {

SelectivityEstimate estimate_selectivity(const FilterSpec& filter, const StreamSpec& stream,
                                         std::uint64_t seed, std::size_t sample_size) {
    if (sample_size < 1) throw_invalid("selectivity sample size must be >= 1");
    auto msg = filter_applicability(filter, stream.schema);
    if (!msg.empty()) throw_invalid("filter not applicable to stream schema: " + msg);

    StreamGenerator gen(stream, seed);
    std::size_t passed = 0;
    for (std::size_t i = 0; i < sample_size; ++i)
        if (filter_matches(filter, gen.next())) ++passed;
    return SelectivityEstimate{static_cast<double>(passed) / static_cast<double>(sample_size), sample_size};
}

} // namespace pdsp
