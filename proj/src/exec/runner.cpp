#include "exec/runner.hpp"

#include "dataflow/validate.hpp"
#include "exec/semantics.hpp"
#include "exec/threads.hpp"

namespace pdsp {

const char* exec_mode_name(ExecMode m) { return m == ExecMode::Sim ? "sim" : "threads"; }

ExecMode exec_mode_from_name(const std::string& name) {
    if (name == "sim") return ExecMode::Sim;
    if (name == "threads" || name == "thread") return ExecMode::Threads;
    throw_invalid("unknown execution mode: " + name);
}

RunResult run_sim(const QueryPlan& plan, const ClusterProfile& cluster, const CostModelParams& cost,
                  const RunOptions& options) {
    auto phys = expand_to_physical(plan);
    auto placement = place(phys, cluster, options.placement, options.slots_per_core);
    auto sem = run_semantics(phys, cost, options.seed, options.duration_us);
    auto timings = simulate_timing(phys, sem, cluster, placement, cost, options.duration_us,
                                   options.collect_trace);

    RunResult result;
    result.plan_id = plan.id;
    result.cluster = cluster.name;
    result.mode = ExecMode::Sim;
    result.duration_us = options.duration_us;
    result.latencies_us = std::move(timings.sink_latencies_us);
    result.output_digest = sem.output_digest;
    result.sink_deliveries = sem.sink_deliveries;
    result.throughput_tps = throughput_tps(sem.sink_deliveries, options.duration_us);
    if (options.collect_outputs) result.outputs = sem.sink_outputs;
    if (options.collect_trace) result.trace = std::move(timings.trace);
    return result;
}

RunResult run_threads(const QueryPlan& plan, const ClusterProfile& cluster, const CostModelParams& cost,
                      const RunOptions& options) {
    auto phys = expand_to_physical(plan);
    auto placement = place(phys, cluster, options.placement, options.slots_per_core);

    ThreadRunConfig config;
    config.duration_us = options.duration_us;
    config.seed = options.seed;
    config.time_scale = options.time_scale;
    config.queue_capacity = options.queue_capacity;
    auto outcome = run_threaded(phys, cluster, placement, cost, config);

    RunResult result;
    result.plan_id = plan.id;
    result.cluster = cluster.name;
    result.mode = ExecMode::Threads;
    result.duration_us = options.duration_us;
    result.latencies_us = std::move(outcome.sink_latencies_us);
    result.output_digest = outcome.output_digest;
    result.sink_deliveries = outcome.sink_deliveries;
    result.throughput_tps = throughput_tps(outcome.sink_deliveries, options.duration_us);
    if (options.collect_outputs) result.outputs = std::move(outcome.sink_outputs);
    return result;
}

ProtocolResult run_protocol(const QueryPlan& plan, const ClusterProfile& cluster,
                            const CostModelParams& cost, const RunOptions& options, ExecMode mode,
                            int runs, bool vary_seeds) {
    if (runs < 1) throw_invalid("run protocol needs at least one run");
    ProtocolResult protocol;
    std::vector<std::vector<double>> per_run;
    double throughput_sum = 0;
    for (int r = 0; r < runs; ++r) {
        RunOptions run_options = options;
        if (vary_seeds) run_options.seed = mix_seed(options.seed, static_cast<std::uint64_t>(r));
        RunResult result;
        try {
            result = mode == ExecMode::Sim ? run_sim(plan, cluster, cost, run_options)
                                           : run_threads(plan, cluster, cost, run_options);
        } catch (const Error& e) {
            throw Error(e.code(), "run " + std::to_string(r) + ": " + e.what());
        }
        result.run_index = r;
        if (result.latencies_us.empty())
            throw Error(ErrorCode::Execution,
                        "plan " + plan.id + " produced no sink output within the run duration");
        per_run.push_back(result.latencies_us);
        throughput_sum += result.throughput_tps;
        protocol.runs.push_back(std::move(result));
    }
    protocol.latency = summarize_latency_runs(per_run);
    protocol.mean_of_medians = protocol.latency.mean_of_medians;
    protocol.throughput_tps = throughput_sum / static_cast<double>(runs);
    return protocol;
}

} // namespace pdsp
