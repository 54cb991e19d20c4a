#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dataflow/types.hpp"

namespace pdsp {

enum class StrategyKind { Random, RuleBased, Exhaustive, MinAvgMax, Increasing, ParameterBased };

const char* strategy_kind_name(StrategyKind k);
StrategyKind strategy_kind_from_name(const std::string& name);

struct EnumerationStrategy {
    StrategyKind kind = StrategyKind::Random;
    int degree_min = 1;
    int degree_max = 1;
    // Per-operator overrides of [min, max]; operators not listed use the
    // global range.
    std::map<std::string, std::pair<int, int>> per_op_ranges;
    // ParameterBased assignments: operator id -> degree. Must cover every
    // enumerable operator.
    std::map<std::string, int> assignments;
    // When set, sources and sinks participate in enumeration too (they
    // otherwise stay at degree 1).
    bool include_sources_sinks = false;

    void validate() const;
};

// Workload characteristics driving the rule-based strategy.
struct RuleContext {
    std::map<std::string, double> source_rates;  // source op id -> events/s
    std::map<std::string, double> selectivities; // filter op id -> pass rate
    double per_core_capacity = 100000.0;         // tuples/s one 1.0-speed core sustains
    int total_cores = 0;                         // informational
    double join_selectivity = 0.01;

    // Prefills rates from the plan's stream specs and selectivities from its
    // filter estimates.
    static RuleContext from_plan(const QueryPlan& plan, double per_core_capacity, int total_cores);
};

// Stateful generator over parallelism assignments of a base plan. Every
// emitted plan re-validates; forward edges whose endpoint degrees diverge are
// coerced to rebalance and the coercion is recorded in the plan notes.
class Enumeration {
public:
    virtual ~Enumeration() = default;
    virtual bool has_next() const = 0;
    virtual QueryPlan next() = 0;
    // Total plans the strategy will emit; nullopt for unbounded Random.
    virtual std::optional<std::uint64_t> total() const = 0;
};

// Operators eligible for degree assignment: non-source, non-sink (unless
// included), and safe to scale (stateless or key-partitioned).
std::vector<std::string> enumerable_operators(const QueryPlan& base, const EnumerationStrategy& strategy);

std::unique_ptr<Enumeration> enumerate(const QueryPlan& base, const EnumerationStrategy& strategy,
                                       const RuleContext& ctx, std::uint64_t seed);

std::optional<std::uint64_t> count_enumeration(const QueryPlan& base, const EnumerationStrategy& strategy);

// Propagated input rate per operator under the rule-based model (documented
// in the rule-based strategy notes); exposed for tests.
std::map<std::string, double> propagate_rates(const QueryPlan& plan, const RuleContext& ctx);

// Round-half-to-even of the midpoint, the "average" of MinAvgMax.
int min_avg_max_mid(int lo, int hi);

} // namespace pdsp
