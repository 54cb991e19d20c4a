#pragma once

#include <string>
#include <vector>

#include "dataflow/physical.hpp"
#include "exec/cluster.hpp"

namespace pdsp {

enum class PlacementPolicy { RoundRobin, CapacityWeighted };

const char* placement_policy_name(PlacementPolicy p);
PlacementPolicy placement_policy_from_name(const std::string& name);

struct Placement {
    std::vector<std::size_t> node_of; // per instance index

    bool cross_node(const PhysicalPlan& phys, const Channel& ch) const {
        return node_of[ch.from_instance] != node_of[ch.to_instance];
    }
};

// Deterministic instance-to-node mapping. round_robin walks instances in
// topological-then-index order and assigns nodes cyclically (skipping full
// ones); capacity_weighted fills nodes proportionally to cores*speed_factor.
// Throws Error(Execution) naming the shortfall when slots run out
// (slots per node = slots_per_core * cores).
Placement place(const PhysicalPlan& phys, const ClusterProfile& cluster, PlacementPolicy policy,
                int slots_per_core = 1);

} // namespace pdsp
