#include "exec/sim.hpp"

#include <cmath>
#include <queue>

namespace pdsp {

namespace {

enum class EventKind { Ready, Complete };

struct Event {
    double t;
    std::uint64_t seq;
    EventKind kind;
    std::size_t instance;

    bool operator>(const Event& other) const {
        if (t != other.t) return t > other.t;
        return seq > other.seq;
    }
};

struct InstanceState {
    std::size_t next = 0;
    double prev_end = 0;
    bool busy = false;
    std::vector<double> arrival;     // per step; NaN = not arrived
    std::size_t open_channels = 0;   // inbound channels not yet closed
    double close_arrival = 0;        // running max of channel close times
};

} // namespace

SimTimings simulate_timing(const PhysicalPlan& phys, const SemanticsResult& sem,
                           const ClusterProfile& cluster, const Placement& placement,
                           const CostModelParams& cost, double duration_us, bool collect_trace) {
    const QueryPlan& plan = *phys.plan;
    SimTimings timings;

    const double nan = std::nan("");
    std::vector<InstanceState> state(phys.instances.size());
    for (std::size_t i = 0; i < phys.instances.size(); ++i) {
        state[i].arrival.assign(sem.steps[i].size(), nan);
        state[i].open_channels = sem.inbound_channels[i].size();
        const auto& op = plan.operators[phys.instances[i].op_index];
        if (op.kind == OpKind::Source) {
            for (std::size_t s = 0; s < sem.steps[i].size(); ++s)
                state[i].arrival[s] = sem.steps[i][s].source_event_ts;
        } else if (state[i].open_channels == 0) {
            // unreachable for valid plans; close immediately
            state[i].arrival.back() = 0;
        }
    }

    // service time of a step once placed
    auto service_of = [&](std::size_t inst, const SemStep& step) {
        const auto& node = cluster.nodes[placement.node_of[inst]];
        const auto& op = plan.operators[phys.instances[inst].op_index];
        double service = step.service_speed1 / node.speed_factor;
        if (op.parallelism > 1 && !step.is_close)
            service += cost.coordination_overhead * std::log2(static_cast<double>(op.parallelism));
        return service;
    };

    auto channel_delay = [&](const Channel& ch, std::uint32_t bytes) {
        double delay = cost.shuffle_cost;
        std::size_t from_node = placement.node_of[ch.from_instance];
        std::size_t to_node = placement.node_of[ch.to_instance];
        if (from_node != to_node) {
            const auto& link = cluster.nodes[from_node];
            delay += link.link_latency_us;
            if (link.link_bandwidth_gbps > 0)
                delay += static_cast<double>(bytes) * 8.0 / (link.link_bandwidth_gbps * 1000.0);
        }
        return delay;
    };

    std::vector<double> channel_last_arrival(phys.channels.size(), 0.0);

    std::vector<std::vector<std::size_t>> outbound(phys.instances.size());
    for (std::size_t c = 0; c < phys.channels.size(); ++c)
        outbound[phys.channels[c].from_instance].push_back(c);

    // node core pools: earliest-free-first
    std::vector<std::priority_queue<double, std::vector<double>, std::greater<>>> cores(
        cluster.nodes.size());
    for (std::size_t n = 0; n < cluster.nodes.size(); ++n)
        for (int c = 0; c < cluster.nodes[n].cores; ++c) cores[n].push(0.0);

    std::priority_queue<Event, std::vector<Event>, std::greater<>> events;
    std::uint64_t seq = 0;

    auto try_advance = [&](std::size_t inst) {
        auto& st = state[inst];
        if (st.busy || st.next >= sem.steps[inst].size()) return;
        double arr = st.arrival[st.next];
        if (std::isnan(arr)) return;
        double ready = std::max(arr, st.prev_end);
        st.busy = true;
        events.push(Event{ready, seq++, EventKind::Ready, inst});
    };

    auto channel_closed = [&](std::size_t consumer, double close_time, auto&& advance) {
        auto& st = state[consumer];
        st.close_arrival = std::max(st.close_arrival, close_time);
        if (--st.open_channels == 0) {
            st.arrival.back() = st.close_arrival; // the close step is always last
            advance(consumer);
        }
    };

    for (std::size_t i = 0; i < phys.instances.size(); ++i) try_advance(i);

    while (!events.empty()) {
        Event ev = events.top();
        events.pop();
        auto& st = state[ev.instance];
        const auto& op = plan.operators[phys.instances[ev.instance].op_index];
        const auto& step = sem.steps[ev.instance][st.next];

        if (ev.kind == EventKind::Ready) {
            double service = service_of(ev.instance, step);
            double start = ev.t;
            bool uses_core = service > 0.0 && op.kind != OpKind::Source && op.kind != OpKind::Sink;
            if (uses_core) {
                auto& pool = cores[placement.node_of[ev.instance]];
                double free = pool.top();
                pool.pop();
                start = std::max(start, free);
                pool.push(start + service);
            }
            if (collect_trace)
                timings.trace.push_back(TraceEvent{start, static_cast<std::uint32_t>(ev.instance),
                                                   static_cast<std::uint32_t>(st.next), 's'});
            events.push(Event{start + service, seq++, EventKind::Complete, ev.instance});
            continue;
        }

        // Complete
        double t = ev.t;
        timings.makespan_us = std::max(timings.makespan_us, t);
        if (collect_trace)
            timings.trace.push_back(TraceEvent{t, static_cast<std::uint32_t>(ev.instance),
                                               static_cast<std::uint32_t>(st.next), 'c'});

        for (std::size_t m : step.out_messages) {
            const auto& msg = sem.messages[m];
            const auto& ch = phys.channels[msg.channel];
            double arr = std::max(channel_last_arrival[msg.channel], t + channel_delay(ch, msg.wire_bytes));
            channel_last_arrival[msg.channel] = arr;
            auto& consumer = state[ch.to_instance];
            consumer.arrival[msg.consumer_step] = arr;
            if (collect_trace)
                timings.trace.push_back(TraceEvent{arr, static_cast<std::uint32_t>(ch.to_instance),
                                                   static_cast<std::uint32_t>(msg.consumer_step), 'a'});
            try_advance(ch.to_instance);
        }

        if (op.kind == OpKind::Sink && !step.is_close) {
            timings.sink_latencies_us.push_back(t - step.production_ts);
            if (collect_trace)
                timings.trace.push_back(TraceEvent{t, static_cast<std::uint32_t>(ev.instance),
                                                   static_cast<std::uint32_t>(st.next), 'd'});
        }

        if (step.is_close) {
            // propagate end-of-stream on every outbound channel of this instance
            for (std::size_t c : outbound[ev.instance]) {
                double close_time =
                    std::max(channel_last_arrival[c], t + channel_delay(phys.channels[c], 0));
                channel_last_arrival[c] = close_time;
                channel_closed(phys.channels[c].to_instance, close_time, try_advance);
            }
        }

        st.prev_end = t;
        st.busy = false;
        st.next++;
        try_advance(ev.instance);
    }

    (void)duration_us;
    return timings;
}

} // namespace pdsp
