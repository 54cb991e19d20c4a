#include "exec/semantics.hpp"

#include <algorithm>
#include <map>

#include "exec/logic.hpp"
#include "workload/stream.hpp"

namespace pdsp {

std::uint64_t digest_of_multiset(std::vector<std::string> canonical) {
    std::sort(canonical.begin(), canonical.end());
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& s : canonical) {
        h = fnv1a64(s.data(), s.size(), h);
        h = fnv1a64("\n", 1, h);
    }
    return h;
}

ChannelRouter::ChannelRouter(const PhysicalPlan& phys) : phys_(phys) {
    const QueryPlan& plan = *phys.plan;
    inbound_.resize(phys.instances.size());
    for (std::size_t c = 0; c < phys.channels.size(); ++c) {
        const auto& ch = phys.channels[c];
        groups_[{ch.from_instance, ch.edge_index}].push_back(c);
        inbound_[ch.to_instance].push_back(c);
    }
    for (auto& [key, chans] : groups_)
        std::sort(chans.begin(), chans.end(), [&](std::size_t a, std::size_t b) {
            return phys.channels[a].to_instance < phys.channels[b].to_instance;
        });
    for (auto& chans : inbound_) std::sort(chans.begin(), chans.end());

    edge_partitioning_.resize(plan.edges.size());
    edge_key_.resize(plan.edges.size());
    for (std::size_t e = 0; e < plan.edges.size(); ++e) {
        const auto* downstream = plan.find_op(plan.edges[e].to);
        edge_partitioning_[e] = downstream->inbound.kind;
        edge_key_[e] = downstream->inbound.key_field;
    }

    // Pre-create every cursor so pick() never restructures the map. Distinct
    // producers then mutate distinct entries, which keeps concurrent routing
    // from the threaded engine's workers well-defined.
    for (const auto& [key, chans] : groups_) cursors_[key] = 0;
}

const std::vector<std::size_t>& ChannelRouter::group(std::size_t from_instance, std::size_t edge) const {
    static const std::vector<std::size_t> empty;
    auto it = groups_.find({from_instance, edge});
    return it == groups_.end() ? empty : it->second;
}

std::size_t ChannelRouter::pick(std::size_t from_instance, std::size_t edge, const Tuple& t) {
    const auto& chans = group(from_instance, edge);
    if (chans.empty()) throw Error(ErrorCode::Internal, "routing over missing channel group");
    switch (edge_partitioning_[edge]) {
        case PartitioningKind::Forward:
            return chans[0]; // forward pairs i -> i: exactly one channel per producer
        case PartitioningKind::Rebalance: {
            auto& cursor = cursors_.find({from_instance, edge})->second;
            return chans[cursor++ % chans.size()];
        }
        case PartitioningKind::Hashing:
            return chans[hash_value(t.values[*edge_key_[edge]]) % chans.size()];
    }
    throw Error(ErrorCode::Internal, "unhandled partitioning");
}

namespace {

struct PendingTuple {
    Tuple tuple;
    std::size_t message = kNoIndex;
};

} // namespace

SemanticsResult run_semantics(const PhysicalPlan& phys, const CostModelParams& cost, std::uint64_t seed,
                              double duration_us) {
    const QueryPlan& plan = *phys.plan;
    if (duration_us <= 0) throw_invalid("run duration must be positive");

    SemanticsResult result;
    result.steps.resize(phys.instances.size());

    ChannelRouter router(phys);
    result.inbound_channels = router.inbound();

    // channel queues filled by producers, drained by the consumer's merge
    std::vector<std::vector<PendingTuple>> channel_queue(phys.channels.size());

    auto route_output = [&](std::size_t from_instance, const Tuple& t) {
        const auto& op = plan.operators[phys.instances[from_instance].op_index];
        for (std::size_t e = 0; e < plan.edges.size(); ++e) {
            if (plan.edges[e].from != op.id) continue;
            std::size_t channel = router.pick(from_instance, e, t);
            std::size_t msg = result.messages.size();
            result.messages.push_back(
                SemMessage{channel, 0, static_cast<std::uint32_t>(tuple_wire_bytes(t))});
            channel_queue[channel].push_back(PendingTuple{t, msg});
        }
    };

    auto order = topological_order(plan);
    for (std::size_t op_idx : order) {
        const auto& op = plan.operators[op_idx];

        // join side lookup per edge
        std::map<std::size_t, int> side_of_edge;
        if (op.kind == OpKind::WindowJoin) {
            for (std::size_t e = 0; e < plan.edges.size(); ++e)
                if (plan.edges[e].to == op.id)
                    side_of_edge[e] = plan.edges[e].from == op.join->left_op ? 0 : 1;
        }

        for (std::size_t inst : phys.op_instances[op_idx]) {
            auto& steps = result.steps[inst];
            auto logic = InstanceLogic::create(op, duration_us);
            EmitStats totals;

            auto emit_step = [&](const Tuple* in, std::size_t in_msg, bool close,
                                 std::vector<Tuple>& outs, const EmitStats& stats) {
                SemStep step;
                step.in_message = in_msg;
                step.is_close = close;
                if (in) {
                    step.event_ts = in->event_ts;
                    step.production_ts = in->production_ts;
                }
                double base = close ? 0.0 : cost.base_cost(op);
                step.service_speed1 = base + stats.window_fires * cost.agg_fire_cost +
                                      stats.join_matches * cost.join_match_cost;
                if (op.kind == OpKind::Sink && in) {
                    result.sink_outputs.push_back(tuple_canonical(*in));
                    result.sink_deliveries++;
                } else {
                    for (auto& t : outs) {
                        std::size_t first_new = result.messages.size();
                        route_output(inst, t);
                        for (std::size_t m = first_new; m < result.messages.size(); ++m)
                            step.out_messages.push_back(m);
                    }
                }
                steps.push_back(std::move(step));
            };

            if (op.kind == OpKind::Source) {
                auto stream_it = plan.streams.find(op.id);
                if (stream_it == plan.streams.end()) throw_invalid("source without stream: " + op.id);
                auto tuples =
                    generate_stream_for(stream_it->second, mix_seed(seed, 1000 + op_idx), duration_us);
                int p = op.parallelism;
                for (std::size_t j = 0; j < tuples.size(); ++j) {
                    if (static_cast<int>(j % static_cast<std::size_t>(p)) !=
                        phys.instances[inst].instance_index)
                        continue;
                    std::vector<Tuple> outs = {tuples[j]};
                    EmitStats stats;
                    SemStep step;
                    step.is_close = false;
                    step.source_event_ts = tuples[j].event_ts;
                    step.event_ts = tuples[j].event_ts;
                    step.production_ts = tuples[j].production_ts;
                    step.service_speed1 = cost.base_cost(op);
                    for (auto& t : outs) {
                        std::size_t first_new = result.messages.size();
                        route_output(inst, t);
                        for (std::size_t m = first_new; m < result.messages.size(); ++m)
                            step.out_messages.push_back(m);
                    }
                    steps.push_back(std::move(step));
                    (void)stats;
                }
            } else {
                // deterministic k-way merge over the inbound channels
                const auto& in_chans = result.inbound_channels[inst];
                std::vector<std::size_t> cursor(in_chans.size(), 0);
                for (;;) {
                    std::size_t best = kNoIndex;
                    for (std::size_t c = 0; c < in_chans.size(); ++c) {
                        if (cursor[c] >= channel_queue[in_chans[c]].size()) continue;
                        if (best == kNoIndex) {
                            best = c;
                            continue;
                        }
                        const auto& cand = channel_queue[in_chans[c]][cursor[c]].tuple;
                        const auto& cur = channel_queue[in_chans[best]][cursor[best]].tuple;
                        if (cand.event_ts < cur.event_ts) best = c;
                        // ties resolve to the lower channel rank, i.e. current best
                    }
                    if (best == kNoIndex) break;
                    auto& pending = channel_queue[in_chans[best]][cursor[best]];
                    cursor[best]++;

                    int side = 0;
                    if (op.kind == OpKind::WindowJoin)
                        side = side_of_edge.at(phys.channels[in_chans[best]].edge_index);

                    std::vector<Tuple> outs;
                    EmitStats stats;
                    logic->on_tuple(pending.tuple, side, outs, stats);
                    totals.window_fires += stats.window_fires;
                    totals.join_matches += stats.join_matches;
                    std::size_t msg = pending.message;
                    result.messages[msg].consumer_step = steps.size();
                    emit_step(&pending.tuple, msg, false, outs, stats);
                }

                // close: flush complete windows
                std::vector<Tuple> outs;
                EmitStats stats;
                logic->on_close(outs, stats);
                emit_step(nullptr, kNoIndex, true, outs, stats);

                // free consumed queues
                for (std::size_t c : in_chans) {
                    channel_queue[c].clear();
                    channel_queue[c].shrink_to_fit();
                }
            }

            if (op.kind == OpKind::Source) {
                // source close marker (end of stream)
                SemStep close;
                close.is_close = true;
                close.source_event_ts = duration_us;
                steps.push_back(std::move(close));
            }
        }
    }

    result.output_digest = digest_of_multiset(result.sink_outputs);
    return result;
}

} // namespace pdsp
