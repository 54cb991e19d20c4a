#include "ml/features.hpp"

#include <algorithm>
#include <cmath>

#include "exec/placement.hpp"

namespace pdsp {

const std::vector<std::string>& flat_feature_names() {
    static const std::vector<std::string> names = {
        "n_source", "n_filter", "n_map", "n_flat_map", "n_window_aggregate", "n_window_join",
        "n_udo", "n_sink", "parallelism_sum", "parallelism_mean", "parallelism_max",
        "max_source_rate", "mean_tuple_width", "mean_window_length", "mean_filter_selectivity",
        "cluster_total_cores", "cluster_mean_speed",
    };
    return names;
}

std::vector<double> featurize_flat(const RunRecord& record) {
    const auto& plan = record.plan;
    std::vector<double> f(flat_feature_names().size(), 0.0);

    double parallelism_sum = 0, parallelism_max = 0;
    double window_sum = 0;
    int window_count = 0;
    double sel_sum = 0;
    int sel_count = 0;
    for (const auto& op : plan.operators) {
        f[static_cast<std::size_t>(op.kind)] += 1.0;
        parallelism_sum += op.parallelism;
        parallelism_max = std::max(parallelism_max, static_cast<double>(op.parallelism));
        const WindowSpec* w = nullptr;
        if (op.agg) w = &op.agg->window;
        if (op.join) w = &op.join->window;
        if (w) {
            window_sum += static_cast<double>(w->length);
            window_count++;
        }
        if (op.filter) {
            sel_sum += op.filter->estimated_selectivity;
            sel_count++;
        }
    }
    f[8] = parallelism_sum;
    f[9] = parallelism_sum / static_cast<double>(plan.operators.size());
    f[10] = parallelism_max;

    double max_rate = 0, width_sum = 0;
    for (const auto& [id, s] : plan.streams) {
        max_rate = std::max(max_rate, s.event_rate);
        width_sum += static_cast<double>(s.schema.width());
    }
    f[11] = max_rate;
    f[12] = plan.streams.empty() ? 0.0 : width_sum / static_cast<double>(plan.streams.size());
    f[13] = window_count ? window_sum / window_count : 0.0;
    f[14] = sel_count ? sel_sum / sel_count : 1.0;
    f[15] = static_cast<double>(record.cluster.total_cores());
    double speed_sum = 0;
    for (const auto& n : record.cluster.nodes) speed_sum += n.speed_factor;
    f[16] = record.cluster.nodes.empty()
                ? 1.0
                : speed_sum / static_cast<double>(record.cluster.nodes.size());
    return f;
}

const std::vector<std::string>& node_feature_names() {
    static const std::vector<std::string> names = {
        "is_source", "is_filter", "is_map", "is_flat_map", "is_window_aggregate", "is_window_join",
        "is_udo", "is_sink", "parallelism", "selectivity", "window_length_ms", "window_length_tuples",
        "slide_fraction", "log_event_rate", "placement_cores", "placement_speed",
    };
    return names;
}

PlanGraph featurize_graph(const RunRecord& record) {
    const auto& plan = record.plan;
    PlanGraph g;

    // placement-derived node features: re-derive the deterministic mapping the
    // run used
    auto phys = expand_to_physical(plan);
    auto policy = placement_policy_from_name(record.placement_policy);
    auto placement = place(phys, record.cluster, policy);

    auto order = topological_order(plan);
    std::vector<std::size_t> node_of_op(plan.operators.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) node_of_op[order[pos]] = pos;

    g.node_features.resize(order.size());
    g.op_ids.resize(order.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const auto& op = plan.operators[order[pos]];
        std::vector<double> f(node_feature_names().size(), 0.0);
        f[static_cast<std::size_t>(op.kind)] = 1.0;
        f[8] = static_cast<double>(op.parallelism);
        f[9] = op.filter ? op.filter->estimated_selectivity : 1.0;
        const WindowSpec* w = nullptr;
        if (op.agg) w = &op.agg->window;
        if (op.join) w = &op.join->window;
        if (w) {
            if (w->policy == WindowPolicy::Time)
                f[10] = static_cast<double>(w->length);
            else
                f[11] = static_cast<double>(w->length);
            f[12] = w->kind == WindowKind::Sliding
                        ? static_cast<double>(w->slide_or_length()) / static_cast<double>(w->length)
                        : 1.0;
        }
        if (op.kind == OpKind::Source) {
            auto it = plan.streams.find(op.id);
            if (it != plan.streams.end()) f[13] = std::log1p(it->second.event_rate);
        }
        double cores = 0, speed = 0;
        const auto& instances = phys.op_instances[order[pos]];
        for (std::size_t inst : instances) {
            const auto& node = record.cluster.nodes[placement.node_of[inst]];
            cores += node.cores;
            speed += node.speed_factor;
        }
        if (!instances.empty()) {
            f[14] = cores / static_cast<double>(instances.size());
            f[15] = speed / static_cast<double>(instances.size());
        }
        g.node_features[pos] = std::move(f);
        g.op_ids[pos] = op.id;
        if (op.kind == OpKind::Sink) g.sink_node = pos;
    }

    std::map<std::string, std::size_t> node_by_id;
    for (std::size_t pos = 0; pos < order.size(); ++pos) node_by_id[g.op_ids[pos]] = pos;
    for (const auto& e : plan.edges) g.edges.push_back({node_by_id.at(e.from), node_by_id.at(e.to)});
    return g;
}

} // namespace pdsp
