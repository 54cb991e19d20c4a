#include "exec/threads.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <thread>

#include "exec/logic.hpp"
#include "workload/stream.hpp"

namespace pdsp {

namespace {

using Clock = std::chrono::steady_clock;

struct ThreadMsg {
    Tuple tuple;
    bool close = false;
};

// Inbound side of one operator instance: one FIFO per inbound channel,
// guarded by a single per-instance mutex so the consumer can do a blocking
// k-way merge across its channels.
struct Mailbox {
    std::mutex mu;
    std::condition_variable data_cv;  // consumer waits for heads
    std::condition_variable space_cv; // producers wait for room
    std::vector<std::deque<ThreadMsg>> queues;
    std::vector<bool> closed;
};

struct SharedState {
    std::atomic<bool> abort{false};
    std::mutex error_mu;
    std::string first_error;

    void fail(const std::string& message) {
        {
            std::lock_guard<std::mutex> lock(error_mu);
            if (first_error.empty()) first_error = message;
        }
        abort.store(true);
    }
};

constexpr auto kBlockTimeout = std::chrono::seconds(10);

} // namespace

ThreadRunOutcome run_threaded(const PhysicalPlan& phys, const ClusterProfile& cluster,
                              const Placement& placement, const CostModelParams& cost,
                              const ThreadRunConfig& config) {
    const QueryPlan& plan = *phys.plan;
    if (config.time_scale <= 0) throw_invalid("time scale must be positive");
    if (config.queue_capacity < 1) throw_invalid("queue capacity must be >= 1");

    ChannelRouter router(phys);

    // mailbox per instance; slot index of each channel within its consumer
    std::vector<Mailbox> mailboxes(phys.instances.size());
    std::vector<std::size_t> slot_of_channel(phys.channels.size());
    for (std::size_t i = 0; i < phys.instances.size(); ++i) {
        const auto& inbound = router.inbound()[i];
        mailboxes[i].queues.resize(inbound.size());
        mailboxes[i].closed.assign(inbound.size(), false);
        for (std::size_t s = 0; s < inbound.size(); ++s) slot_of_channel[inbound[s]] = s;
    }

    SharedState shared;
    const auto t0 = Clock::now();
    const double scale = config.time_scale;

    auto wall_to_virtual_us = [&](Clock::time_point now) {
        return std::chrono::duration<double, std::micro>(now - t0).count() / scale;
    };

    auto push = [&](std::size_t channel, ThreadMsg msg) {
        std::size_t consumer = phys.channels[channel].to_instance;
        auto& box = mailboxes[consumer];
        std::size_t slot = slot_of_channel[channel];
        std::unique_lock<std::mutex> lock(box.mu);
        while (box.queues[slot].size() >= config.queue_capacity) {
            if (shared.abort.load()) return;
            if (box.space_cv.wait_for(lock, kBlockTimeout) == std::cv_status::timeout) {
                shared.fail("channel into " + phys.instances[consumer].id +
                            " blocked for 10s (possible routing stall)");
                box.data_cv.notify_all();
                return;
            }
        }
        box.queues[slot].push_back(std::move(msg));
        box.data_cv.notify_all();
    };

    // per-worker accumulated busy time, slept in coarse chunks
    auto make_delayer = [&]() {
        return [debt_us = 0.0, scale](double service_virtual_us) mutable {
            debt_us += service_virtual_us * scale;
            if (debt_us >= 200.0) {
                std::this_thread::sleep_for(std::chrono::duration<double, std::micro>(debt_us));
                debt_us = 0.0;
            }
        };
    };

    ThreadRunOutcome outcome;
    std::mutex sink_mu;

    auto source_worker = [&](std::size_t inst) {
        const auto& op = plan.operators[phys.instances[inst].op_index];
        auto stream_it = plan.streams.find(op.id);
        if (stream_it == plan.streams.end()) throw_invalid("source without stream: " + op.id);
        auto tuples = generate_stream_for(stream_it->second, mix_seed(config.seed, 1000 + phys.instances[inst].op_index),
                                          config.duration_us);
        int p = op.parallelism;
        int my_index = phys.instances[inst].instance_index;
        for (std::size_t j = 0; j < tuples.size(); ++j) {
            if (shared.abort.load()) return;
            if (static_cast<int>(j % static_cast<std::size_t>(p)) != my_index) continue;
            // pace production to the scaled event time
            auto due = t0 + std::chrono::duration_cast<Clock::duration>(
                                std::chrono::duration<double, std::micro>(tuples[j].event_ts * scale));
            if (due > Clock::now() + std::chrono::milliseconds(1)) std::this_thread::sleep_until(due);
            // wall-clock lineage: latency measures from the actual production
            // instant, which may trail the nominal event time under load
            tuples[j].production_ts =
                std::max(tuples[j].production_ts, wall_to_virtual_us(Clock::now()));
            for (std::size_t e = 0; e < plan.edges.size(); ++e) {
                if (plan.edges[e].from != op.id) continue;
                std::size_t channel = router.pick(inst, e, tuples[j]);
                push(channel, ThreadMsg{tuples[j], false});
                if (shared.abort.load()) return;
            }
        }
        for (std::size_t e = 0; e < plan.edges.size(); ++e) {
            if (plan.edges[e].from != op.id) continue;
            for (std::size_t channel : router.group(inst, e)) push(channel, ThreadMsg{Tuple{}, true});
        }
    };

    auto operator_worker = [&](std::size_t inst) {
        const auto& op = plan.operators[phys.instances[inst].op_index];
        const auto& node = cluster.nodes[placement.node_of[inst]];
        auto logic = InstanceLogic::create(op, config.duration_us);
        auto delay = make_delayer();
        auto& box = mailboxes[inst];
        const auto& inbound = router.inbound()[inst];

        std::map<std::size_t, int> side_of_edge;
        if (op.kind == OpKind::WindowJoin)
            for (std::size_t e = 0; e < plan.edges.size(); ++e)
                if (plan.edges[e].to == op.id)
                    side_of_edge[e] = plan.edges[e].from == op.join->left_op ? 0 : 1;

        // Routes outputs (thread-local buffer) while not holding our own lock.
        auto route_outs = [&](std::vector<Tuple>& outs) {
            for (auto& t : outs) {
                for (std::size_t e = 0; e < plan.edges.size(); ++e) {
                    if (plan.edges[e].from != op.id) continue;
                    push(router.pick(inst, e, t), ThreadMsg{t, false});
                    if (shared.abort.load()) return;
                }
            }
        };

        for (;;) {
            if (shared.abort.load()) return;
            ThreadMsg msg;
            std::size_t slot = 0;
            bool all_closed = false;
            bool popped = false;
            {
                std::unique_lock<std::mutex> lock(box.mu);
                while (!popped) {
                    // consume end-of-stream markers eagerly; they carry no data
                    for (std::size_t s = 0; s < inbound.size(); ++s) {
                        while (!box.queues[s].empty() && box.queues[s].front().close) {
                            box.queues[s].pop_front();
                            box.closed[s] = true;
                            box.space_cv.notify_all();
                        }
                    }
                    bool waiting_needed = false;
                    std::size_t best = kNoIndex;
                    all_closed = true;
                    for (std::size_t s = 0; s < inbound.size(); ++s) {
                        if (box.closed[s] && box.queues[s].empty()) continue;
                        all_closed = false;
                        if (box.queues[s].empty()) {
                            waiting_needed = true; // open channel with unknown head
                            continue;
                        }
                        if (best == kNoIndex ||
                            box.queues[s].front().tuple.event_ts <
                                box.queues[best].front().tuple.event_ts)
                            best = s;
                        // ties keep the lower slot (same order as the simulation)
                    }
                    if (all_closed) break;
                    if (!waiting_needed && best != kNoIndex) {
                        msg = std::move(box.queues[best].front());
                        box.queues[best].pop_front();
                        slot = best;
                        popped = true;
                        box.space_cv.notify_all();
                        break;
                    }
                    if (shared.abort.load()) return;
                    if (box.data_cv.wait_for(lock, kBlockTimeout) == std::cv_status::timeout) {
                        shared.fail("instance " + phys.instances[inst].id + " starved for 10s");
                        return;
                    }
                }
            }

            if (all_closed) break;

            int side = op.kind == OpKind::WindowJoin
                           ? side_of_edge.at(phys.channels[inbound[slot]].edge_index)
                           : 0;
            std::vector<Tuple> outs;
            EmitStats stats;
            logic->on_tuple(msg.tuple, side, outs, stats);

            double service = cost.base_cost(op) / node.speed_factor +
                             stats.window_fires * cost.agg_fire_cost / node.speed_factor +
                             stats.join_matches * cost.join_match_cost / node.speed_factor;
            if (op.parallelism > 1)
                service += cost.coordination_overhead * std::log2(static_cast<double>(op.parallelism));
            delay(service);

            if (op.kind == OpKind::Sink) {
                double delivered_at = wall_to_virtual_us(Clock::now());
                std::lock_guard<std::mutex> lock(sink_mu);
                outcome.sink_latencies_us.push_back(delivered_at - msg.tuple.production_ts);
                outcome.sink_outputs.push_back(tuple_canonical(msg.tuple));
            } else {
                route_outs(outs);
            }
        }

        // end of stream: flush and propagate close
        std::vector<Tuple> outs;
        EmitStats stats;
        logic->on_close(outs, stats);
        if (op.kind != OpKind::Sink) {
            route_outs(outs);
            for (std::size_t e = 0; e < plan.edges.size(); ++e) {
                if (plan.edges[e].from != op.id) continue;
                for (std::size_t channel : router.group(inst, e)) push(channel, ThreadMsg{Tuple{}, true});
            }
        }
    };

    std::vector<std::thread> workers;
    workers.reserve(phys.instances.size());
    for (std::size_t i = 0; i < phys.instances.size(); ++i) {
        bool is_source = plan.operators[phys.instances[i].op_index].kind == OpKind::Source;
        workers.emplace_back([&, i, is_source]() {
            try {
                if (is_source)
                    source_worker(i);
                else
                    operator_worker(i);
            } catch (const std::exception& e) {
                shared.fail("worker " + phys.instances[i].id + ": " + e.what());
                for (auto& box : mailboxes) {
                    std::lock_guard<std::mutex> lock(box.mu);
                    box.data_cv.notify_all();
                    box.space_cv.notify_all();
                }
            }
        });
    }
    for (auto& w : workers) w.join();

    if (shared.abort.load())
        throw Error(ErrorCode::Execution, "threaded run failed: " + shared.first_error);

    outcome.sink_deliveries = outcome.sink_outputs.size();
    outcome.output_digest = digest_of_multiset(outcome.sink_outputs);
    return outcome;
}

} // namespace pdsp
