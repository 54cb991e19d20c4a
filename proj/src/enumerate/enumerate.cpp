#include "enumerate/enumerate.hpp"

#include <algorithm>
#include <cmath>

#include "dataflow/validate.hpp"
#include "util/rng.hpp"

namespace pdsp {

const char* strategy_kind_name(StrategyKind k) {
    switch (k) {
        case StrategyKind::Random: return "random";
        case StrategyKind::RuleBased: return "rule";
        case StrategyKind::Exhaustive: return "exhaustive";
        case StrategyKind::MinAvgMax: return "minavgmax";
        case StrategyKind::Increasing: return "increasing";
        case StrategyKind::ParameterBased: return "parameter";
    }
    return "?";
}

StrategyKind strategy_kind_from_name(const std::string& name) {
    if (name == "random") return StrategyKind::Random;
    if (name == "rule" || name == "rule-based" || name == "rulebased") return StrategyKind::RuleBased;
    if (name == "exhaustive") return StrategyKind::Exhaustive;
    if (name == "minavgmax") return StrategyKind::MinAvgMax;
    if (name == "increasing") return StrategyKind::Increasing;
    if (name == "parameter" || name == "parameter-based") return StrategyKind::ParameterBased;
    throw_invalid("unknown enumeration strategy: " + name);
}

void EnumerationStrategy::validate() const {
    if (degree_min < 1 || degree_min > degree_max)
        throw_invalid("enumeration strategy requires 1 <= degree_min <= degree_max");
    for (const auto& [op, range] : per_op_ranges)
        if (range.first < 1 || range.first > range.second)
            throw_invalid("bad per-operator degree range for " + op);
    for (const auto& [op, degree] : assignments)
        if (degree < 1) throw_invalid("parameter-based degree for " + op + " must be >= 1");
}

RuleContext RuleContext::from_plan(const QueryPlan& plan, double per_core_capacity, int total_cores) {
    RuleContext ctx;
    ctx.per_core_capacity = per_core_capacity;
    ctx.total_cores = total_cores;
    for (const auto& [id, stream] : plan.streams) ctx.source_rates[id] = stream.event_rate;
    for (const auto& op : plan.operators)
        if (op.kind == OpKind::Filter && op.filter)
            ctx.selectivities[op.id] = op.filter->estimated_selectivity;
    return ctx;
}

int min_avg_max_mid(int lo, int hi) {
    double mid = (static_cast<double>(lo) + static_cast<double>(hi)) / 2.0;
    double floor = std::floor(mid);
    if (mid - floor == 0.5) {
        // round half to even
        auto f = static_cast<long long>(floor);
        return static_cast<int>(f % 2 == 0 ? f : f + 1);
    }
    return static_cast<int>(std::llround(mid));
}

std::vector<std::string> enumerable_operators(const QueryPlan& base, const EnumerationStrategy& strategy) {
    std::vector<std::string> out;
    auto order = topological_order(base);
    for (std::size_t idx : order) {
        const auto& op = base.operators[idx];
        bool endpoint = op.kind == OpKind::Source || op.kind == OpKind::Sink;
        if (endpoint && !strategy.include_sources_sinks) continue;
        // Non-keyed stateful operators stay single-instance.
        if (op_is_stateful(op) && op.inbound.kind != PartitioningKind::Hashing) continue;
        out.push_back(op.id);
    }
    return out;
}

namespace {

std::pair<int, int> range_of(const EnumerationStrategy& s, const std::string& op) {
    auto it = s.per_op_ranges.find(op);
    if (it != s.per_op_ranges.end()) return it->second;
    return {s.degree_min, s.degree_max};
}

QueryPlan apply_assignment(const QueryPlan& base, const std::map<std::string, int>& degrees) {
    QueryPlan plan = base;
    for (auto& op : plan.operators) {
        auto it = degrees.find(op.id);
        op.parallelism = it == degrees.end() ? 1 : it->second;
    }
    // Forward routing is only defined between equal degrees; coerce diverging
    // edges to rebalance and record the change on the plan.
    for (auto& op : plan.operators) {
        if (op.inbound.kind != PartitioningKind::Forward) continue;
        for (const auto& in : plan.inputs_of(op.id)) {
            const auto* up = plan.find_op(in);
            if (up && up->parallelism != op.parallelism) {
                op.inbound.kind = PartitioningKind::Rebalance;
                plan.notes.push_back("coerced forward to rebalance on edge " + in + " -> " + op.id);
                break;
            }
        }
    }
    require_valid(plan);
    return plan;
}

class FixedSequenceEnumeration : public Enumeration {
public:
    FixedSequenceEnumeration(const QueryPlan& base, std::vector<std::map<std::string, int>> assignments)
        : base_(base), assignments_(std::move(assignments)) {}

    bool has_next() const override { return index_ < assignments_.size(); }

    QueryPlan next() override {
        if (!has_next()) throw_invalid("enumeration exhausted");
        QueryPlan plan = apply_assignment(base_, assignments_[index_]);
        plan.id = base_.id + "-p" + std::to_string(index_);
        ++index_;
        return plan;
    }

    std::optional<std::uint64_t> total() const override { return assignments_.size(); }

private:
    QueryPlan base_;
    std::vector<std::map<std::string, int>> assignments_;
    std::size_t index_ = 0;
};

class RandomEnumeration : public Enumeration {
public:
    RandomEnumeration(const QueryPlan& base, const EnumerationStrategy& strategy,
                      std::vector<std::string> ops, std::uint64_t seed)
        : base_(base), strategy_(strategy), ops_(std::move(ops)), rng_(mix_seed(seed, 40)) {}

    bool has_next() const override { return true; }

    QueryPlan next() override {
        std::map<std::string, int> degrees;
        for (const auto& op : ops_) {
            auto [lo, hi] = range_of(strategy_, op);
            degrees[op] = static_cast<int>(rng_.uniform_int(lo, hi + 1));
        }
        QueryPlan plan = apply_assignment(base_, degrees);
        plan.id = base_.id + "-p" + std::to_string(index_++);
        return plan;
    }

    std::optional<std::uint64_t> total() const override { return std::nullopt; }

private:
    QueryPlan base_;
    EnumerationStrategy strategy_;
    std::vector<std::string> ops_;
    Rng rng_;
    std::size_t index_ = 0;
};

} // namespace

std::map<std::string, double> propagate_rates(const QueryPlan& plan, const RuleContext& ctx) {
    std::map<std::string, double> in_rate;  // rate entering the operator
    std::map<std::string, double> out_rate; // rate it forwards downstream
    auto order = topological_order(plan);
    for (std::size_t idx : order) {
        const auto& op = plan.operators[idx];
        double in = 0.0;
        if (op.kind == OpKind::Source) {
            auto it = ctx.source_rates.find(op.id);
            if (it == ctx.source_rates.end())
                throw_invalid("rule context missing source rate for " + op.id);
            in = it->second;
        } else {
            for (const auto& up : plan.inputs_of(op.id)) {
                auto it = out_rate.find(up);
                if (it == out_rate.end()) throw Error(ErrorCode::Internal, "rate order violated");
                in += it->second;
            }
        }
        in_rate[op.id] = in;

        double out = in;
        switch (op.kind) {
            case OpKind::Filter: {
                auto it = ctx.selectivities.find(op.id);
                if (it == ctx.selectivities.end())
                    throw_invalid("rule context missing selectivity for filter " + op.id);
                out = in * it->second;
                break;
            }
            case OpKind::WindowAggregate: {
                const auto& w = op.agg->window;
                if (w.policy == WindowPolicy::Count) {
                    out = in / static_cast<double>(w.kind == WindowKind::Sliding ? w.slide_or_length()
                                                                                 : w.length);
                } else {
                    double slide_fraction =
                        w.kind == WindowKind::Sliding
                            ? static_cast<double>(w.slide_or_length()) / static_cast<double>(w.length)
                            : 1.0;
                    out = in * slide_fraction;
                }
                break;
            }
            case OpKind::WindowJoin: {
                auto ins = plan.inputs_of(op.id);
                double rl = out_rate[ins[0]];
                double rr = out_rate[ins.size() > 1 ? ins[1] : ins[0]];
                double w_sec = op.join->window.length_us() / 1e6;
                double denom = std::max(std::max(rl, rr), 1e-9);
                double rate = ctx.join_selectivity * rl * rr * w_sec / denom;
                double cap = rl * rr * w_sec;
                out = std::min(rate, cap);
                break;
            }
            default:
                break;
        }
        out_rate[op.id] = out;
    }
    return in_rate;
}

std::unique_ptr<Enumeration> enumerate(const QueryPlan& base, const EnumerationStrategy& strategy,
                                       const RuleContext& ctx, std::uint64_t seed) {
    strategy.validate();
    {
        // Bases arrive un-enumerated: every degree still 1.
        QueryPlan probe = base;
        require_valid(probe);
        for (const auto& op : base.operators)
            if (op.parallelism != 1)
                throw_invalid("enumeration base plan must have all parallelism = 1 (operator " + op.id +
                              ")");
    }

    auto ops = enumerable_operators(base, strategy);

    switch (strategy.kind) {
        case StrategyKind::Random:
            return std::make_unique<RandomEnumeration>(base, strategy, ops, seed);

        case StrategyKind::RuleBased: {
            if (ctx.per_core_capacity <= 0) throw_invalid("per-core capacity must be positive");
            auto rates = propagate_rates(base, ctx);
            std::map<std::string, int> degrees;
            for (const auto& op : ops) {
                auto [lo, hi] = range_of(strategy, op);
                int degree = static_cast<int>(std::ceil(rates.at(op) / ctx.per_core_capacity));
                degrees[op] = std::clamp(degree, lo, hi);
            }
            return std::make_unique<FixedSequenceEnumeration>(
                base, std::vector<std::map<std::string, int>>{degrees});
        }

        case StrategyKind::Exhaustive: {
            // Cartesian product in lexicographic order, first operator slowest.
            std::vector<std::map<std::string, int>> all;
            std::vector<int> current(ops.size());
            for (std::size_t i = 0; i < ops.size(); ++i) current[i] = range_of(strategy, ops[i]).first;
            for (;;) {
                std::map<std::string, int> degrees;
                for (std::size_t i = 0; i < ops.size(); ++i) degrees[ops[i]] = current[i];
                all.push_back(std::move(degrees));
                std::size_t pos = ops.size();
                while (pos > 0) {
                    --pos;
                    auto [lo, hi] = range_of(strategy, ops[pos]);
                    if (current[pos] < hi) {
                        ++current[pos];
                        for (std::size_t j = pos + 1; j < ops.size(); ++j)
                            current[j] = range_of(strategy, ops[j]).first;
                        break;
                    }
                    if (pos == 0) return std::make_unique<FixedSequenceEnumeration>(base, std::move(all));
                }
                if (ops.empty()) return std::make_unique<FixedSequenceEnumeration>(base, std::move(all));
            }
        }

        case StrategyKind::MinAvgMax: {
            std::vector<std::map<std::string, int>> cycle(3);
            for (const auto& op : ops) {
                auto [lo, hi] = range_of(strategy, op);
                cycle[0][op] = lo;
                cycle[1][op] = min_avg_max_mid(lo, hi);
                cycle[2][op] = hi;
            }
            return std::make_unique<FixedSequenceEnumeration>(base, std::move(cycle));
        }

        case StrategyKind::Increasing: {
            // Step each operator from min to max in topological order; already
            // stepped operators hold max, later operators hold min.
            std::vector<std::map<std::string, int>> steps;
            for (std::size_t i = 0; i < ops.size(); ++i) {
                auto [lo, hi] = range_of(strategy, ops[i]);
                for (int d = lo; d <= hi; ++d) {
                    std::map<std::string, int> degrees;
                    for (std::size_t j = 0; j < i; ++j) degrees[ops[j]] = range_of(strategy, ops[j]).second;
                    degrees[ops[i]] = d;
                    for (std::size_t j = i + 1; j < ops.size(); ++j)
                        degrees[ops[j]] = range_of(strategy, ops[j]).first;
                    steps.push_back(std::move(degrees));
                }
            }
            return std::make_unique<FixedSequenceEnumeration>(base, std::move(steps));
        }

        case StrategyKind::ParameterBased: {
            std::map<std::string, int> degrees;
            for (const auto& op : ops) {
                auto it = strategy.assignments.find(op);
                if (it == strategy.assignments.end())
                    throw_invalid("parameter-based strategy missing assignment for operator " + op);
                auto [lo, hi] = range_of(strategy, op);
                if (it->second < lo || it->second > hi)
                    throw_invalid("parameter-based degree " + std::to_string(it->second) +
                                  " out of range for operator " + op);
                degrees[op] = it->second;
            }
            for (const auto& [op, degree] : strategy.assignments)
                if (!degrees.count(op)) {
                    const auto* spec = base.find_op(op);
                    if (!spec) throw_invalid("parameter-based assignment for unknown operator " + op);
                    // endpoints or non-scalable operators: only degree 1 is valid
                    if (degree != 1)
                        throw_invalid("operator " + op + " is not enumerable; only degree 1 allowed");
                }
            return std::make_unique<FixedSequenceEnumeration>(
                base, std::vector<std::map<std::string, int>>{degrees});
        }
    }
    throw Error(ErrorCode::Internal, "unhandled strategy");
}

std::optional<std::uint64_t> count_enumeration(const QueryPlan& base, const EnumerationStrategy& strategy) {
    strategy.validate();
    require_valid(base);
    auto ops = enumerable_operators(base, strategy);
    switch (strategy.kind) {
        case StrategyKind::Random:
            return std::nullopt;
        case StrategyKind::RuleBased:
        case StrategyKind::ParameterBased:
            return 1;
        case StrategyKind::MinAvgMax:
            return 3;
        case StrategyKind::Exhaustive: {
            std::uint64_t total = 1;
            for (const auto& op : ops) {
                auto [lo, hi] = range_of(strategy, op);
                total *= static_cast<std::uint64_t>(hi - lo + 1);
            }
            return total;
        }
        case StrategyKind::Increasing: {
            std::uint64_t total = 0;
            for (const auto& op : ops) {
                auto [lo, hi] = range_of(strategy, op);
                total += static_cast<std::uint64_t>(hi - lo + 1);
            }
            return total;
        }
    }
    return std::nullopt;
}

} // namespace pdsp
