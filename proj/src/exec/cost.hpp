#pragma once

#include <map>
#include <string>

#include "json.hpp"

#include "dataflow/types.hpp"

namespace pdsp {

// Execution cost model (microseconds of 1.0-speed core time). Parametric by
// design: the engine is the harness's stand-in system under test, and these
// knobs are what make saturation, shuffle and coordination phenomena
// representable and calibratable.
struct CostModelParams {
    double filter_cost = 1.0;        // per tuple
    double map_cost = 1.0;
    double flatmap_cost = 1.0;
    double agg_tuple_cost = 2.0;     // per tuple
    double agg_fire_cost = 5.0;      // per window fire
    double join_tuple_cost = 3.0;    // per tuple
    double join_match_cost = 1.0;    // per emitted match (probe cost)
    double source_cost = 0.0;
    double sink_cost = 0.0;
    double udo_default_cost = 5.0;   // per tuple
    std::map<std::string, double> udo_cost; // per stand-in behavior name

    // Added per tuple at operators with parallelism p > 1: value * log2(p).
    double coordination_overhead = 0.5;
    // Added to every channel traversal between distinct instances.
    double shuffle_cost = 0.1;

    double base_cost(const OperatorSpec& op) const {
        switch (op.kind) {
            case OpKind::Source: return source_cost;
            case OpKind::Filter: return filter_cost;
            case OpKind::Map: return map_cost;
            case OpKind::FlatMap: return flatmap_cost;
            case OpKind::WindowAggregate: return agg_tuple_cost;
            case OpKind::WindowJoin: return join_tuple_cost;
            case OpKind::Sink: return sink_cost;
            case OpKind::Udo: {
                if (op.udo) {
                    auto it = udo_cost.find(udo_behavior_name(op.udo->behavior));
                    if (it != udo_cost.end()) return it->second;
                }
                return udo_default_cost;
            }
        }
        return 0.0;
    }
};

CostModelParams cost_params_from_json(const nlohmann::json& j);
nlohmann::json cost_params_to_json(const CostModelParams& p);

} // namespace pdsp
