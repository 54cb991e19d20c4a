#include "exec/placement.hpp"

namespace pdsp {

const char* placement_policy_name(PlacementPolicy p) {
    return p == PlacementPolicy::RoundRobin ? "round_robin" : "capacity_weighted";
}

PlacementPolicy placement_policy_from_name(const std::string& name) {
    if (name == "round_robin") return PlacementPolicy::RoundRobin;
    if (name == "capacity_weighted") return PlacementPolicy::CapacityWeighted;
    throw_invalid("unknown placement policy: " + name);
}

Placement place(const PhysicalPlan& phys, const ClusterProfile& cluster, PlacementPolicy policy,
                int slots_per_core) {
    if (slots_per_core < 1) throw_invalid("slots_per_core must be >= 1");
    const auto& plan = *phys.plan;

    std::vector<std::size_t> ordered; // topological op order, then instance index
    for (std::size_t op_idx : topological_order(plan))
        for (std::size_t inst : phys.op_instances[op_idx]) ordered.push_back(inst);

    std::vector<int> capacity(cluster.nodes.size());
    long long total_slots = 0;
    for (std::size_t n = 0; n < cluster.nodes.size(); ++n) {
        capacity[n] = cluster.nodes[n].cores * slots_per_core;
        total_slots += capacity[n];
    }
    if (static_cast<long long>(phys.instances.size()) > total_slots)
        throw Error(ErrorCode::Execution,
                    "placement needs " + std::to_string(phys.instances.size()) + " slots but cluster " +
                        cluster.name + " provides only " + std::to_string(total_slots));

    Placement placement;
    placement.node_of.resize(phys.instances.size());
    std::vector<int> used(cluster.nodes.size(), 0);

    if (policy == PlacementPolicy::RoundRobin) {
        std::size_t cursor = 0;
        for (std::size_t inst : ordered) {
            std::size_t probes = 0;
            while (used[cursor % cluster.nodes.size()] >= capacity[cursor % cluster.nodes.size()]) {
                ++cursor;
                if (++probes > cluster.nodes.size())
                    throw Error(ErrorCode::Execution, "placement ran out of slots");
            }
            std::size_t node = cursor % cluster.nodes.size();
            placement.node_of[inst] = node;
            used[node]++;
            ++cursor;
        }
    } else {
        double total_weight = 0;
        std::vector<double> weight(cluster.nodes.size());
        for (std::size_t n = 0; n < cluster.nodes.size(); ++n) {
            weight[n] = static_cast<double>(cluster.nodes[n].cores) * cluster.nodes[n].speed_factor;
            total_weight += weight[n];
        }
        std::size_t assigned = 0;
        for (std::size_t inst : ordered) {
            // next node by largest remaining quota
            std::size_t best = cluster.nodes.size();
            double best_deficit = -1e300;
            for (std::size_t n = 0; n < cluster.nodes.size(); ++n) {
                if (used[n] >= capacity[n]) continue;
                double target = weight[n] / total_weight * static_cast<double>(assigned + 1);
                double deficit = target - static_cast<double>(used[n]);
                if (deficit > best_deficit + 1e-12) {
                    best_deficit = deficit;
                    best = n;
                }
            }
            if (best == cluster.nodes.size())
                throw Error(ErrorCode::Execution, "placement ran out of slots");
            placement.node_of[inst] = best;
            used[best]++;
            ++assigned;
        }
    }
    return placement;
}

} // namespace pdsp
