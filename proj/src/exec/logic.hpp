#pragma once

#include <memory>
#include <vector>

#include "dataflow/tuple.hpp"
#include "dataflow/types.hpp"

namespace pdsp {

struct EmitStats {
    int window_fires = 0;
    int join_matches = 0;
};

// Per-instance operator state machine, shared verbatim by the virtual-clock
// simulation and the threaded engine so both modes compute identical output
// multisets. Instances consume their inputs in deterministic merge order
// (event_ts, then inbound channel rank), which both modes enforce.
class InstanceLogic {
public:
    virtual ~InstanceLogic() = default;

    // side: 0 for single-input operators; joins receive 0 = left, 1 = right.
    virtual void on_tuple(const Tuple& t, int side, std::vector<Tuple>& out, EmitStats& stats) = 0;

    // End of stream: time windows complete before `duration_us` fire, partial
    // count windows are dropped.
    virtual void on_close(std::vector<Tuple>& out, EmitStats& stats) = 0;

    static std::unique_ptr<InstanceLogic> create(const OperatorSpec& op, double duration_us);
};

// Worst-case-linear selection (median of medians); index is 0-based rank.
// The machine-outlier stand-in uses it for exact sliding-buffer medians.
double bfprt_select(std::vector<double> values, std::size_t index);

} // namespace pdsp
