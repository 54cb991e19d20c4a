#pragma once

#include <vector>

#include "exec/placement.hpp"
#include "exec/semantics.hpp"

namespace pdsp {

struct TraceEvent {
    double t_us = 0;
    std::uint32_t instance = 0;
    std::uint32_t step = 0;
    char kind = '?'; // 'a' arrive, 's' start, 'c' complete, 'd' deliver
};

struct SimTimings {
    std::vector<double> sink_latencies_us; // one per sink delivery
    std::vector<TraceEvent> trace;         // when requested
    double makespan_us = 0;
};

// Virtual-clock timing over the precomputed semantics: per-instance FCFS
// service, cores-limited execution per node, FIFO channels with shuffle and
// cross-node network delays. Deterministic; queue growth models backpressure.
SimTimings simulate_timing(const PhysicalPlan& phys, const SemanticsResult& sem,
                           const ClusterProfile& cluster, const Placement& placement,
                           const CostModelParams& cost, double duration_us, bool collect_trace);

} // namespace pdsp
