#include "dataflow/physical.hpp"

#include <map>

#include "dataflow/validate.hpp"

namespace pdsp {

PhysicalPlan expand_to_physical(const QueryPlan& plan) {
    require_valid(plan);

    PhysicalPlan phys;
    phys.plan = &plan;
    phys.op_instances.resize(plan.operators.size());

    std::map<std::string, std::size_t> op_index;
    for (std::size_t i = 0; i < plan.operators.size(); ++i) {
        const auto& op = plan.operators[i];
        op_index[op.id] = i;
        for (int k = 0; k < op.parallelism; ++k) {
            phys.op_instances[i].push_back(phys.instances.size());
            phys.instances.push_back(Instance{i, k, op.id + "#" + std::to_string(k)});
        }
    }

    for (std::size_t e = 0; e < plan.edges.size(); ++e) {
        const auto& edge = plan.edges[e];
        std::size_t from = op_index.at(edge.from);
        std::size_t to = op_index.at(edge.to);
        const auto& ups = phys.op_instances[from];
        const auto& downs = phys.op_instances[to];
        if (plan.operators[to].inbound.kind == PartitioningKind::Forward) {
            for (std::size_t i = 0; i < ups.size(); ++i)
                phys.channels.push_back(Channel{ups[i], downs[i], e});
        } else {
            for (std::size_t u : ups)
                for (std::size_t d : downs) phys.channels.push_back(Channel{u, d, e});
        }
    }
    return phys;
}

} // namespace pdsp
