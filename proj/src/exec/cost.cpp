#include "exec/cost.hpp"

#include <set>

namespace pdsp {

using nlohmann::json;

json cost_params_to_json(const CostModelParams& p) {
    json j;
    j["filter_cost"] = p.filter_cost;
    j["map_cost"] = p.map_cost;
    j["flatmap_cost"] = p.flatmap_cost;
    j["agg_tuple_cost"] = p.agg_tuple_cost;
    j["agg_fire_cost"] = p.agg_fire_cost;
    j["join_tuple_cost"] = p.join_tuple_cost;
    j["join_match_cost"] = p.join_match_cost;
    j["source_cost"] = p.source_cost;
    j["sink_cost"] = p.sink_cost;
    j["udo_default_cost"] = p.udo_default_cost;
    j["udo_cost"] = p.udo_cost;
    j["coordination_overhead"] = p.coordination_overhead;
    j["shuffle_cost"] = p.shuffle_cost;
    return j;
}

CostModelParams cost_params_from_json(const json& j) {
    static const std::set<std::string> allowed = {
        "filter_cost",   "map_cost",      "flatmap_cost",        "agg_tuple_cost", "agg_fire_cost",
        "join_tuple_cost", "join_match_cost", "source_cost",     "sink_cost",      "udo_default_cost",
        "udo_cost",      "coordination_overhead", "shuffle_cost",
    };
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) throw_invalid("unknown cost parameter: " + it.key());
    CostModelParams p;
    auto get = [&](const char* key, double& field) {
        if (j.contains(key)) field = j.at(key).get<double>();
        if (field < 0) throw_invalid(std::string("cost parameter must be >= 0: ") + key);
    };
    get("filter_cost", p.filter_cost);
    get("map_cost", p.map_cost);
    get("flatmap_cost", p.flatmap_cost);
    get("agg_tuple_cost", p.agg_tuple_cost);
    get("agg_fire_cost", p.agg_fire_cost);
    get("join_tuple_cost", p.join_tuple_cost);
    get("join_match_cost", p.join_match_cost);
    get("source_cost", p.source_cost);
    get("sink_cost", p.sink_cost);
    get("udo_default_cost", p.udo_default_cost);
    get("coordination_overhead", p.coordination_overhead);
    get("shuffle_cost", p.shuffle_cost);
    if (j.contains("udo_cost")) p.udo_cost = j.at("udo_cost").get<std::map<std::string, double>>();
    return p;
}

} // namespace pdsp
