#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dataflow/types.hpp"

namespace pdsp {

struct Instance {
    std::size_t op_index = 0;  // into plan.operators
    int instance_index = 0;    // 0..parallelism-1
    std::string id;            // "<op id>#<index>"
};

struct Channel {
    std::size_t from_instance = 0; // into PhysicalPlan.instances
    std::size_t to_instance = 0;
    std::size_t edge_index = 0;    // into plan.edges
};

// Instance-level expansion of a logical plan. Instance ids are deterministic
// (operator id, index); channel layout follows the partitioning strategy:
// forward pairs instance i with instance i, rebalance and hashing produce the
// full bipartite set.
struct PhysicalPlan {
    const QueryPlan* plan = nullptr;
    std::vector<Instance> instances;
    std::vector<Channel> channels;
    std::vector<std::vector<std::size_t>> op_instances; // per operator index -> instance indices

    std::size_t instance_count() const { return instances.size(); }
    std::size_t channel_count() const { return channels.size(); }
};

PhysicalPlan expand_to_physical(const QueryPlan& plan);

} // namespace pdsp
