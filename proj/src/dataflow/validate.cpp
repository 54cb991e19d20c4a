#include "dataflow/validate.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "dataflow/tuple.hpp"

namespace pdsp {

std::string ValidationReport::joined() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < violations.size(); ++i) {
        if (i) os << "; ";
        os << violations[i];
    }
    return os.str();
}

namespace {

bool edges_form_dag(const QueryPlan& plan) {
    try {
        topological_order(plan);
        return true;
    } catch (const Error&) {
        return false;
    }
}

} // namespace

ValidationReport validate_plan(const QueryPlan& plan) {
    ValidationReport report;
    auto add = [&](const std::string& msg) { report.violations.push_back(msg); };

    std::map<std::string, const OperatorSpec*> by_id;
    for (const auto& op : plan.operators) {
        if (by_id.count(op.id)) add("duplicate operator id: " + op.id);
        by_id[op.id] = &op;
    }

    bool edges_resolve = true;
    for (const auto& e : plan.edges) {
        if (!by_id.count(e.from) || !by_id.count(e.to)) {
            add("edge references unknown operator: " + e.from + " -> " + e.to);
            edges_resolve = false;
        }
        if (e.from == e.to) add("self edge on " + e.from);
    }
    if (!edges_resolve) return report;

    if (!edges_form_dag(plan)) {
        add("not a DAG: edge set of plan " + plan.id + " contains a cycle");
        return report;
    }

    // Degree constraints per kind.
    std::size_t sinks = 0;
    for (const auto& op : plan.operators) {
        auto ins = plan.inputs_of(op.id);
        auto outs = plan.outputs_of(op.id);
        switch (op.kind) {
            case OpKind::Source:
                if (!ins.empty()) add("source " + op.id + " has inbound edges");
                if (outs.empty()) add("source " + op.id + " has no outbound edge");
                if (!plan.streams.count(op.id)) add("source " + op.id + " has no stream spec");
                break;
            case OpKind::Sink:
                ++sinks;
                if (ins.empty()) add("sink " + op.id + " has no inbound edge");
                if (!outs.empty()) add("sink " + op.id + " has outbound edges");
                break;
            case OpKind::WindowJoin:
                if (ins.size() != 2)
                    add("window_join " + op.id + " must have exactly 2 inbound edges, has " +
                        std::to_string(ins.size()));
                if (!op.join) add("window_join " + op.id + " missing join spec");
                break;
            default:
                if (ins.size() != 1)
                    add(std::string(op_kind_name(op.kind)) + " " + op.id +
                        " must have exactly 1 inbound edge, has " + std::to_string(ins.size()));
                break;
        }
        if (op.kind != OpKind::Source && plan.streams.count(op.id))
            add("non-source " + op.id + " has a stream spec");
        if (op.parallelism < 1) add("operator " + op.id + " has parallelism < 1");
    }
    if (sinks != 1) add("plan must have exactly one sink, has " + std::to_string(sinks));

    // Reachability from sources.
    {
        std::set<std::string> reached;
        std::vector<std::string> frontier;
        for (const auto& op : plan.operators)
            if (op.kind == OpKind::Source) {
                reached.insert(op.id);
                frontier.push_back(op.id);
            }
        while (!frontier.empty()) {
            auto id = frontier.back();
            frontier.pop_back();
            for (const auto& out : plan.outputs_of(id))
                if (reached.insert(out).second) frontier.push_back(out);
        }
        for (const auto& op : plan.operators)
            if (!reached.count(op.id)) add("operator " + op.id + " not reachable from any source");
    }

    // Schema flow; skipped when the plan is already structurally broken.
    std::map<std::string, TupleSchema> schemas;
    bool schemas_ok = report.ok();
    if (schemas_ok) {
        try {
            schemas = compute_schemas(plan);
        } catch (const Error& e) {
            add(std::string("schema inconsistency: ") + e.what());
            schemas_ok = false;
        }
    }

    for (const auto& op : plan.operators) {
        auto ins = plan.inputs_of(op.id);

        // Partitioning constraints on the inbound edges.
        if (!ins.empty()) {
            if (op.inbound.kind == PartitioningKind::Forward) {
                for (const auto& in : ins) {
                    const auto* up = by_id[in];
                    if (up && up->parallelism != op.parallelism)
                        add("forward requires equal parallelism on edge " + in + " -> " + op.id + " (" +
                            std::to_string(up->parallelism) + " vs " + std::to_string(op.parallelism) + ")");
                }
            }
            if (op.inbound.kind == PartitioningKind::Hashing) {
                if (!op.inbound.key_field) {
                    add("hashing partitioning on " + op.id + " missing key field");
                } else if (schemas_ok) {
                    for (const auto& in : ins) {
                        const auto& up_schema = schemas[in];
                        if (*op.inbound.key_field >= up_schema.width())
                            add("hashing key field " + std::to_string(*op.inbound.key_field) +
                                " not present in upstream schema of " + in);
                    }
                }
            }
        }

        // Stateful operators scale only when key-partitioned; this mirrors the
        // engine restriction that non-keyed windows run single-instance.
        if (op_is_stateful(op) && op.parallelism > 1 && op.inbound.kind != PartitioningKind::Hashing)
            add("stateful operator " + op.id + " with parallelism > 1 requires hashing partitioning");

        if (op.kind == OpKind::Filter) {
            if (!op.filter) {
                add("filter " + op.id + " missing filter spec");
            } else {
                if (op.filter->estimated_selectivity <= 0.0)
                    add("filter " + op.id + " has estimated selectivity <= 0");
                if (schemas_ok && !ins.empty()) {
                    auto msg = filter_applicability(*op.filter, schemas[ins[0]]);
                    if (!msg.empty()) add("filter " + op.id + ": " + msg);
                }
            }
        }

        if (op.kind == OpKind::WindowAggregate && op.agg) {
            const auto& w = op.agg->window;
            if (w.length < 1) add("window length < 1 on " + op.id);
            if (w.kind == WindowKind::Tumbling && w.slide)
                add("tumbling window on " + op.id + " must not declare a slide");
            if (w.kind == WindowKind::Sliding && (!w.slide || *w.slide < 1 || *w.slide > w.length))
                add("sliding window on " + op.id + " requires 0 < slide <= length");
            if (schemas_ok && !ins.empty()) {
                const auto& in_schema = schemas[ins[0]];
                if (op.agg->key_field && *op.agg->key_field >= in_schema.width())
                    add("aggregate key field out of range on " + op.id);
                if (op.agg->value_field) {
                    if (*op.agg->value_field >= in_schema.width())
                        add("aggregate value field out of range on " + op.id);
                    else if (in_schema.fields[*op.agg->value_field] == DataType::String)
                        add("aggregate value field on " + op.id + " must be numeric");
                }
            }
        }

        if (op.kind == OpKind::WindowJoin && op.join) {
            const auto& w = op.join->window;
            if (w.policy != WindowPolicy::Time)
                add("window_join " + op.id + " supports time-policy windows only");
            if (w.length < 1) add("window length < 1 on " + op.id);
            if (w.kind == WindowKind::Tumbling && w.slide)
                add("tumbling window on " + op.id + " must not declare a slide");
            if (w.kind == WindowKind::Sliding && (!w.slide || *w.slide < 1 || *w.slide > w.length))
                add("sliding window on " + op.id + " requires 0 < slide <= length");
            if (ins.size() == 2) {
                if (std::find(ins.begin(), ins.end(), op.join->left_op) == ins.end())
                    add("window_join " + op.id + " left input " + op.join->left_op + " is not an inbound edge");
                else if (schemas_ok) {
                    std::string left = op.join->left_op;
                    std::string right = ins[0] == left ? ins[1] : ins[0];
                    const auto& ls = schemas[left];
                    const auto& rs = schemas[right];
                    if (op.join->left_key >= ls.width())
                        add("join left key out of range on " + op.id);
                    if (op.join->right_key >= rs.width())
                        add("join right key out of range on " + op.id);
                    if (op.join->left_key < ls.width() && op.join->right_key < rs.width() &&
                        ls.fields[op.join->left_key] != rs.fields[op.join->right_key])
                        add("join key types differ on " + op.id);
                }
            }
        }

        if (op.kind == OpKind::Udo && !op.udo) add("udo " + op.id + " missing udo spec");
    }

    // Stream sanity.
    for (const auto& [sid, stream] : plan.streams) {
        if (stream.event_rate <= 0) add("stream of " + sid + " has non-positive event rate");
        if (stream.schema.width() < 1) add("stream of " + sid + " has empty schema");
        if (stream.string_pool < 1) add("stream of " + sid + " has string pool < 1");
        if (stream.key_cardinality < 1) add("stream of " + sid + " has key cardinality < 1");
    }

    return report;
}

void require_valid(const QueryPlan& plan) {
    auto report = validate_plan(plan);
    if (!report.ok())
        throw Error(ErrorCode::InvalidArgument, "plan " + plan.id + " invalid: " + report.joined());
}

} // namespace pdsp
