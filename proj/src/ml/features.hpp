#pragma once

#include <string>
#include <vector>

#include "corpus/store.hpp"

namespace pdsp {

inline constexpr int kFeatureVersion = 1;

// Fixed-length plan/cluster summary for the flat models. Names are stable and
// versioned; normalization statistics live with the trained model.
const std::vector<std::string>& flat_feature_names();

std::vector<double> featurize_flat(const RunRecord& record);

// DAG encoding of a parallel plan: one node per logical operator with a fixed
// feature vector, directed edges following the dataflow, nodes listed in
// topological order.
struct PlanGraph {
    std::vector<std::vector<double>> node_features;
    std::vector<std::pair<std::size_t, std::size_t>> edges; // (from node, to node)
    std::size_t sink_node = 0;
    std::vector<std::string> op_ids;
};

const std::vector<std::string>& node_feature_names();

PlanGraph featurize_graph(const RunRecord& record);

} // namespace pdsp
