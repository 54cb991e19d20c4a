#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "exec/placement.hpp"
#include "exec/semantics.hpp"

namespace pdsp {

struct ThreadRunConfig {
    double duration_us = 3e6;
    std::uint64_t seed = 1;
    double time_scale = 0.01;          // wall seconds per virtual second
    std::size_t queue_capacity = 1024; // bounded channels; producers block
};

struct ThreadRunOutcome {
    std::vector<double> sink_latencies_us; // wall-clock, rescaled to virtual us
    std::vector<std::string> sink_outputs; // canonical forms
    std::uint64_t output_digest = 0;
    std::size_t sink_deliveries = 0;
};

// One worker per operator instance plus source drivers; bounded in-process
// channels with blocking producers model backpressure. Inputs are consumed in
// the same (event_ts, channel rank) merge order as the simulation, so the
// output multiset matches run_sim for identical seeds. Worker failures
// surface as Error(Execution) naming the instance.
ThreadRunOutcome run_threaded(const PhysicalPlan& phys, const ClusterProfile& cluster,
                              const Placement& placement, const CostModelParams& cost,
                              const ThreadRunConfig& config);

} // namespace pdsp
