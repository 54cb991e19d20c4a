#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace pdsp {

// Simulated machine class. speed_factor is clock GHz relative to the 2.0 GHz
// baseline; ram/disk are informational and do not enter the cost model.
struct NodeProfile {
    std::string name;
    int cores = 1;
    double speed_factor = 1.0;
    double ram_gb = 0;
    double disk_gb = 0;
    double link_latency_us = 50.0; // one-way, cross-node hops only
    double link_bandwidth_gbps = 10.0;

    bool operator==(const NodeProfile&) const = default;
};

// Built-in profiles mirror the benchmark testbed classes:
//   m510       8 cores, 2.0 GHz -> 1.0, 64 GB, 256 GB
//   c6525_25g 16 cores, 2.2 GHz -> 1.1, 128 GB, 480 GB
//   c6320     28 cores, 2.0 GHz -> 1.0, 256 GB, 1024 GB
// all with 10 Gbps links.
const std::vector<NodeProfile>& builtin_node_profiles();
const NodeProfile& builtin_node_profile(const std::string& name);

struct ClusterProfile {
    std::string name;
    std::vector<NodeProfile> nodes;

    bool homogeneous() const;
    int total_cores() const;
    // Stable content hash over the node list; recorded with run records so a
    // profile change is visible in the corpus.
    std::string digest() const;
};

// "m510x10", "c6525_25gx10", heterogeneous mixes via '+':
// "m510x5+c6320x5". Also accepts a path to a cluster profile file.
ClusterProfile resolve_cluster(const std::string& spec);

ClusterProfile cluster_from_json(const nlohmann::json& j);
nlohmann::json cluster_to_json(const ClusterProfile& cluster);
ClusterProfile load_cluster_file(const std::string& path);

} // namespace pdsp
