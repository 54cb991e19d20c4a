#include "exec/cluster.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "util/rng.hpp"

namespace pdsp {

using nlohmann::json;

const std::vector<NodeProfile>& builtin_node_profiles() {
    static const std::vector<NodeProfile> profiles = {
        {"m510", 8, 1.0, 64, 256, 50.0, 10.0},
        {"c6525_25g", 16, 1.1, 128, 480, 50.0, 10.0},
        {"c6320", 28, 1.0, 256, 1024, 50.0, 10.0},
    };
    return profiles;
}

const NodeProfile& builtin_node_profile(const std::string& name) {
    for (const auto& p : builtin_node_profiles())
        if (p.name == name) return p;
    throw_invalid("unknown node profile: " + name);
}

bool ClusterProfile::homogeneous() const {
    for (const auto& n : nodes)
        if (!(n == nodes.front())) return false;
    return true;
}

int ClusterProfile::total_cores() const {
    int total = 0;
    for (const auto& n : nodes) total += n.cores;
    return total;
}

std::string ClusterProfile::digest() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& n : nodes) {
        h = fnv1a64(n.name.data(), n.name.size(), h);
        h = fnv1a64(&n.cores, sizeof(n.cores), h);
        h = fnv1a64(&n.speed_factor, sizeof(n.speed_factor), h);
        h = fnv1a64(&n.link_latency_us, sizeof(n.link_latency_us), h);
        h = fnv1a64(&n.link_bandwidth_gbps, sizeof(n.link_bandwidth_gbps), h);
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

namespace {

json node_to_json(const NodeProfile& n) {
    json j;
    j["name"] = n.name;
    j["cores"] = n.cores;
    j["speed_factor"] = n.speed_factor;
    j["ram_gb"] = n.ram_gb;
    j["disk_gb"] = n.disk_gb;
    j["link_latency_us"] = n.link_latency_us;
    j["link_bandwidth_gbps"] = n.link_bandwidth_gbps;
    return j;
}

NodeProfile node_from_json(const json& j) {
    static const std::set<std::string> allowed = {
        "name", "cores", "speed_factor", "ram_gb", "disk_gb", "link_latency_us", "link_bandwidth_gbps",
    };
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) throw_invalid("unknown node profile key: " + it.key());
    NodeProfile n;
    n.name = j.at("name").get<std::string>();
    n.cores = j.at("cores").get<int>();
    if (n.cores < 1) throw_invalid("node profile " + n.name + " needs cores >= 1");
    if (j.contains("speed_factor")) n.speed_factor = j.at("speed_factor").get<double>();
    if (n.speed_factor <= 0) throw_invalid("node profile " + n.name + " needs speed_factor > 0");
    if (j.contains("ram_gb")) n.ram_gb = j.at("ram_gb").get<double>();
    if (j.contains("disk_gb")) n.disk_gb = j.at("disk_gb").get<double>();
    if (j.contains("link_latency_us")) n.link_latency_us = j.at("link_latency_us").get<double>();
    if (j.contains("link_bandwidth_gbps"))
        n.link_bandwidth_gbps = j.at("link_bandwidth_gbps").get<double>();
    return n;
}

} // namespace

json cluster_to_json(const ClusterProfile& cluster) {
    json j;
    j["name"] = cluster.name;
    json nodes = json::array();
    for (const auto& n : cluster.nodes) nodes.push_back(node_to_json(n));
    j["nodes"] = nodes;
    return j;
}

ClusterProfile cluster_from_json(const json& j) {
    ClusterProfile c;
    c.name = j.at("name").get<std::string>();
    for (const auto& n : j.at("nodes")) c.nodes.push_back(node_from_json(n));
    if (c.nodes.empty()) throw_invalid("cluster " + c.name + " has no nodes");
    return c;
}

ClusterProfile load_cluster_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw_io("cannot open cluster profile: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw_invalid("malformed cluster profile " + path + ": " + e.what());
    }
    return cluster_from_json(j);
}

ClusterProfile resolve_cluster(const std::string& spec) {
    if (spec.find('/') != std::string::npos || spec.size() > 5 && spec.substr(spec.size() - 5) == ".json")
        return load_cluster_file(spec);

    ClusterProfile cluster;
    cluster.name = spec;
    std::stringstream ss(spec);
    std::string term;
    while (std::getline(ss, term, '+')) {
        auto x = term.rfind('x');
        if (x == std::string::npos || x == 0 || x + 1 >= term.size())
            throw_invalid("cluster spec term '" + term + "' must look like <profile>x<count>");
        std::string profile = term.substr(0, x);
        int count;
        try {
            count = std::stoi(term.substr(x + 1));
        } catch (const std::exception&) {
            throw_invalid("bad node count in cluster spec term '" + term + "'");
        }
        if (count < 1) throw_invalid("cluster spec needs at least one node per term");
        const auto& base = builtin_node_profile(profile);
        for (int i = 0; i < count; ++i) cluster.nodes.push_back(base);
    }
    if (cluster.nodes.empty()) throw_invalid("cluster spec resolved to zero nodes: " + spec);
    return cluster;
}

} // namespace pdsp
