#pragma once

#include <string>
#include <vector>

#include "exec/cluster.hpp"
#include "exec/cost.hpp"
#include "exec/placement.hpp"
#include "exec/sim.hpp"
#include "metrics/metrics.hpp"

namespace pdsp {

enum class ExecMode { Sim, Threads };

const char* exec_mode_name(ExecMode m);
ExecMode exec_mode_from_name(const std::string& name);

struct RunOptions {
    double duration_us = 3e6;
    std::uint64_t seed = 1;
    PlacementPolicy placement = PlacementPolicy::RoundRobin;
    int slots_per_core = 1;
    bool collect_outputs = false; // keep canonical sink tuples on the result
    bool collect_trace = false;   // sim mode event trace
    double time_scale = 0.01;     // thread mode: wall seconds per virtual second
    std::size_t queue_capacity = 1024;
};

struct RunResult {
    std::string plan_id;
    std::string cluster;
    ExecMode mode = ExecMode::Sim;
    double duration_us = 0;
    int run_index = 0;
    std::vector<double> latencies_us;
    std::uint64_t output_digest = 0;
    std::size_t sink_deliveries = 0;
    double throughput_tps = 0;
    std::vector<std::string> outputs; // canonical, when collect_outputs
    std::vector<TraceEvent> trace;    // sim mode, when collect_trace
};

RunResult run_sim(const QueryPlan& plan, const ClusterProfile& cluster, const CostModelParams& cost,
                  const RunOptions& options);

RunResult run_threads(const QueryPlan& plan, const ClusterProfile& cluster, const CostModelParams& cost,
                      const RunOptions& options);

struct ProtocolResult {
    std::vector<RunResult> runs;
    LatencySummary latency; // pooled percentiles + per-run medians
    double mean_of_medians = 0;
    double throughput_tps = 0; // mean over runs
};

// The measurement protocol: `runs` repetitions of the same workload. With
// vary_seeds the repetitions draw distinct derived seeds instead of replaying
// identical data.
ProtocolResult run_protocol(const QueryPlan& plan, const ClusterProfile& cluster,
                            const CostModelParams& cost, const RunOptions& options, ExecMode mode,
                            int runs = 3, bool vary_seeds = false);

} // namespace pdsp
