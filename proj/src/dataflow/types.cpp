#include "dataflow/types.hpp"

#include <algorithm>
#include <queue>
#include <sstream>

namespace pdsp {

const char* data_type_name(DataType t) {
    switch (t) {
        case DataType::Integer: return "integer";
        case DataType::Double: return "double";
        case DataType::String: return "string";
    }
    return "?";
}

DataType data_type_from_name(const std::string& name) {
    if (name == "integer") return DataType::Integer;
    if (name == "double") return DataType::Double;
    if (name == "string") return DataType::String;
    throw_invalid("unknown data type: " + name);
}

const char* filter_fn_name(FilterFn fn) {
    switch (fn) {
        case FilterFn::Le: return "le";
        case FilterFn::Ge: return "ge";
        case FilterFn::Ne: return "ne";
        case FilterFn::Eq: return "eq";
        case FilterFn::Lt: return "lt";
        case FilterFn::Gt: return "gt";
        case FilterFn::StartsWith: return "starts_with";
        case FilterFn::EndsWith: return "ends_with";
        case FilterFn::EndsNotWith: return "ends_not_with";
        case FilterFn::StartsNotWith: return "starts_not_with";
    }
    return "?";
}

FilterFn filter_fn_from_name(const std::string& name) {
    static const std::map<std::string, FilterFn> table = {
        {"le", FilterFn::Le},
        {"ge", FilterFn::Ge},
        {"ne", FilterFn::Ne},
        {"eq", FilterFn::Eq},
        {"lt", FilterFn::Lt},
        {"gt", FilterFn::Gt},
        {"starts_with", FilterFn::StartsWith},
        {"ends_with", FilterFn::EndsWith},
        {"ends_not_with", FilterFn::EndsNotWith},
        {"starts_not_with", FilterFn::StartsNotWith},
    };
    auto it = table.find(name);
    if (it == table.end()) throw_invalid("unknown filter function: " + name);
    return it->second;
}

bool filter_fn_is_string_only(FilterFn fn) {
    switch (fn) {
        case FilterFn::StartsWith:
        case FilterFn::EndsWith:
        case FilterFn::EndsNotWith:
        case FilterFn::StartsNotWith:
            return true;
        default:
            return false;
    }
}

DataType value_type(const Value& v) {
    if (std::holds_alternative<std::int64_t>(v)) return DataType::Integer;
    if (std::holds_alternative<double>(v)) return DataType::Double;
    return DataType::String;
}

std::string value_to_display(const Value& v) {
    std::ostringstream os;
    if (auto* i = std::get_if<std::int64_t>(&v)) {
        os << *i;
    } else if (auto* d = std::get_if<double>(&v)) {
        os << *d;
    } else {
        os << '"' << std::get<std::string>(v) << '"';
    }
    return os.str();
}

const char* agg_fn_name(AggFn fn) {
    switch (fn) {
        case AggFn::Min: return "min";
        case AggFn::Max: return "max";
        case AggFn::Avg: return "avg";
        case AggFn::Mean: return "mean";
        case AggFn::Sum: return "sum";
    }
    return "?";
}

AggFn agg_fn_from_name(const std::string& name) {
    if (name == "min") return AggFn::Min;
    if (name == "max") return AggFn::Max;
    if (name == "avg") return AggFn::Avg;
    if (name == "mean") return AggFn::Mean;
    if (name == "sum") return AggFn::Sum;
    throw_invalid("unknown aggregate function: " + name);
}

const char* udo_behavior_name(UdoBehavior b) {
    switch (b) {
        case UdoBehavior::SentimentScore: return "sentiment_score";
        case UdoBehavior::GeoBucket: return "geo_bucket";
        case UdoBehavior::MedianOutlier: return "median_outlier";
        case UdoBehavior::RoadMatch: return "road_match";
        case UdoBehavior::TopicThreshold: return "topic_threshold";
        case UdoBehavior::RollingCtr: return "rolling_ctr";
    }
    return "?";
}

UdoBehavior udo_behavior_from_name(const std::string& name) {
    static const std::map<std::string, UdoBehavior> table = {
        {"sentiment_score", UdoBehavior::SentimentScore},
        {"geo_bucket", UdoBehavior::GeoBucket},
        {"median_outlier", UdoBehavior::MedianOutlier},
        {"road_match", UdoBehavior::RoadMatch},
        {"topic_threshold", UdoBehavior::TopicThreshold},
        {"rolling_ctr", UdoBehavior::RollingCtr},
    };
    auto it = table.find(name);
    if (it == table.end()) throw_invalid("unknown udo behavior: " + name);
    return it->second;
}

const char* op_kind_name(OpKind k) {
    switch (k) {
        case OpKind::Source: return "source";
        case OpKind::Filter: return "filter";
        case OpKind::Map: return "map";
        case OpKind::FlatMap: return "flat_map";
        case OpKind::WindowAggregate: return "window_aggregate";
        case OpKind::WindowJoin: return "window_join";
        case OpKind::Udo: return "udo";
        case OpKind::Sink: return "sink";
    }
    return "?";
}

OpKind op_kind_from_name(const std::string& name) {
    static const std::map<std::string, OpKind> table = {
        {"source", OpKind::Source},         {"filter", OpKind::Filter},
        {"map", OpKind::Map},               {"flat_map", OpKind::FlatMap},
        {"window_aggregate", OpKind::WindowAggregate},
        {"window_join", OpKind::WindowJoin},
        {"udo", OpKind::Udo},               {"sink", OpKind::Sink},
    };
    auto it = table.find(name);
    if (it == table.end()) throw_invalid("unknown operator kind: " + name);
    return it->second;
}

const char* partitioning_kind_name(PartitioningKind k) {
    switch (k) {
        case PartitioningKind::Forward: return "forward";
        case PartitioningKind::Rebalance: return "rebalance";
        case PartitioningKind::Hashing: return "hashing";
    }
    return "?";
}

PartitioningKind partitioning_kind_from_name(const std::string& name) {
    if (name == "forward") return PartitioningKind::Forward;
    if (name == "rebalance") return PartitioningKind::Rebalance;
    if (name == "hashing") return PartitioningKind::Hashing;
    throw_invalid("unknown partitioning: " + name);
}

bool op_is_stateful(const OperatorSpec& op) {
    switch (op.kind) {
        case OpKind::WindowAggregate:
        case OpKind::WindowJoin:
            return true;
        case OpKind::Udo:
            return op.udo && (op.udo->behavior == UdoBehavior::MedianOutlier ||
                              op.udo->behavior == UdoBehavior::RollingCtr);
        default:
            return false;
    }
}

const char* arrival_kind_name(ArrivalKind k) {
    switch (k) {
        case ArrivalKind::Uniform: return "uniform";
        case ArrivalKind::Poisson: return "poisson";
        case ArrivalKind::Zipf: return "zipf";
    }
    return "?";
}

ArrivalKind arrival_kind_from_name(const std::string& name) {
    if (name == "uniform") return ArrivalKind::Uniform;
    if (name == "poisson") return ArrivalKind::Poisson;
    if (name == "zipf") return ArrivalKind::Zipf;
    throw_invalid("unknown arrival kind: " + name);
}

const OperatorSpec* QueryPlan::find_op(const std::string& op_id) const {
    for (const auto& op : operators)
        if (op.id == op_id) return &op;
    return nullptr;
}

OperatorSpec* QueryPlan::find_op(const std::string& op_id) {
    for (auto& op : operators)
        if (op.id == op_id) return &op;
    return nullptr;
}

std::vector<std::string> QueryPlan::inputs_of(const std::string& op_id) const {
    std::vector<std::string> result;
    for (const auto& e : edges)
        if (e.to == op_id) result.push_back(e.from);
    return result;
}

std::vector<std::string> QueryPlan::outputs_of(const std::string& op_id) const {
    std::vector<std::string> result;
    for (const auto& e : edges)
        if (e.from == op_id) result.push_back(e.to);
    return result;
}

int QueryPlan::max_parallelism() const {
    int m = 1;
    for (const auto& op : operators) m = std::max(m, op.parallelism);
    return m;
}

const char* parallelism_category_name(ParallelismCategory c) {
    switch (c) {
        case ParallelismCategory::XS: return "XS";
        case ParallelismCategory::S: return "S";
        case ParallelismCategory::M: return "M";
        case ParallelismCategory::L: return "L";
        case ParallelismCategory::XL: return "XL";
        case ParallelismCategory::XXL: return "XXL";
    }
    return "?";
}

ParallelismCategory categorize_parallelism(int max_degree) {
    if (max_degree < 1) throw_invalid("parallelism degree must be >= 1");
    if (max_degree < 8) return ParallelismCategory::XS;
    if (max_degree < 16) return ParallelismCategory::S;
    if (max_degree < 32) return ParallelismCategory::M;
    if (max_degree < 64) return ParallelismCategory::L;
    if (max_degree < 128) return ParallelismCategory::XL;
    return ParallelismCategory::XXL;
}

TupleSchema operator_output_schema(const OperatorSpec& op, const std::vector<TupleSchema>& inputs,
                                   const StreamSpec* source_stream) {
    auto need_one = [&]() -> const TupleSchema& {
        if (inputs.size() != 1)
            throw_invalid("operator " + op.id + " expects exactly one input schema");
        return inputs[0];
    };
    switch (op.kind) {
        case OpKind::Source:
            if (!source_stream) throw_invalid("source " + op.id + " has no stream spec");
            return source_stream->schema;
        case OpKind::Filter:
        case OpKind::Map:
        case OpKind::FlatMap:
        case OpKind::Sink:
            return need_one();
        case OpKind::WindowAggregate: {
            const auto& in = need_one();
            if (!op.agg) throw_invalid("window_aggregate " + op.id + " missing agg spec");
            TupleSchema out;
            if (op.agg->key_field) {
                if (*op.agg->key_field >= in.width())
                    throw_invalid("aggregate key field out of range in " + op.id);
                out.fields.push_back(in.fields[*op.agg->key_field]);
            }
            out.fields.push_back(DataType::Double); // aggregate value
            out.fields.push_back(DataType::Double); // window end timestamp (us)
            return out;
        }
        case OpKind::WindowJoin: {
            if (inputs.size() != 2)
                throw_invalid("window_join " + op.id + " expects two input schemas");
            TupleSchema out = inputs[0];
            out.fields.insert(out.fields.end(), inputs[1].fields.begin(), inputs[1].fields.end());
            return out;
        }
        case OpKind::Udo: {
            const auto& in = need_one();
            if (!op.udo) throw_invalid("udo " + op.id + " missing udo spec");
            TupleSchema out = in;
            switch (op.udo->behavior) {
                case UdoBehavior::SentimentScore:
                    out.fields.push_back(DataType::Double); // score
                    break;
                case UdoBehavior::GeoBucket:
                    out.fields.push_back(DataType::Integer); // bucket
                    break;
                case UdoBehavior::MedianOutlier:
                    out.fields.push_back(DataType::Double);  // window median
                    out.fields.push_back(DataType::Integer); // outlier flag
                    break;
                case UdoBehavior::RoadMatch:
                    out.fields.push_back(DataType::Integer); // segment id
                    break;
                case UdoBehavior::TopicThreshold:
                    break; // filter-like, schema preserved
                case UdoBehavior::RollingCtr:
                    out.fields.push_back(DataType::Double); // rolling ratio
                    break;
            }
            return out;
        }
    }
    throw_invalid("unhandled operator kind");
}

std::vector<std::size_t> topological_order(const QueryPlan& plan) {
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < plan.operators.size(); ++i) index[plan.operators[i].id] = i;

    std::vector<int> in_degree(plan.operators.size(), 0);
    std::vector<std::vector<std::size_t>> adj(plan.operators.size());
    for (const auto& e : plan.edges) {
        auto fi = index.find(e.from);
        auto ti = index.find(e.to);
        if (fi == index.end() || ti == index.end())
            throw_invalid("edge references unknown operator: " + e.from + " -> " + e.to);
        adj[fi->second].push_back(ti->second);
        in_degree[ti->second]++;
    }

    // Smallest-index-first Kahn keeps the order deterministic.
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t i = 0; i < plan.operators.size(); ++i)
        if (in_degree[i] == 0) ready.push(i);

    std::vector<std::size_t> order;
    while (!ready.empty()) {
        std::size_t i = ready.top();
        ready.pop();
        order.push_back(i);
        for (std::size_t j : adj[i])
            if (--in_degree[j] == 0) ready.push(j);
    }
    if (order.size() != plan.operators.size())
        throw_invalid("plan " + plan.id + " is not a DAG");
    return order;
}

std::map<std::string, TupleSchema> compute_schemas(const QueryPlan& plan) {
    std::map<std::string, TupleSchema> out;
    auto order = topological_order(plan);
    for (std::size_t idx : order) {
        const auto& op = plan.operators[idx];
        std::vector<TupleSchema> inputs;
        auto input_ids = plan.inputs_of(op.id);
        if (op.kind == OpKind::WindowJoin && op.join) {
            // left input first, per the join spec
            std::vector<std::string> ordered;
            for (const auto& in : input_ids)
                if (in == op.join->left_op) ordered.push_back(in);
            for (const auto& in : input_ids)
                if (in != op.join->left_op) ordered.push_back(in);
            input_ids = ordered;
        }
        for (const auto& in : input_ids) {
            auto it = out.find(in);
            if (it == out.end()) throw_invalid("input schema missing for " + in);
            inputs.push_back(it->second);
        }
        const StreamSpec* stream = nullptr;
        if (op.kind == OpKind::Source) {
            auto it = plan.streams.find(op.id);
            if (it != plan.streams.end()) stream = &it->second;
        }
        out[op.id] = operator_output_schema(op, inputs, stream);
    }
    return out;
}

const OperatorSpec* upstream_source_of(const QueryPlan& plan, const std::string& op_id) {
    const OperatorSpec* op = plan.find_op(op_id);
    if (!op) return nullptr;
    if (op->kind == OpKind::Source) return op;
    auto ins = plan.inputs_of(op_id);
    std::sort(ins.begin(), ins.end());
    for (const auto& in : ins)
        if (const auto* src = upstream_source_of(plan, in)) return src;
    return nullptr;
}

const std::vector<std::string>& synthetic_structure_tags() {
    static const std::vector<std::string> tags = {
        "linear",     "2-chained-filter", "3-chained-filter", "4-chained-filter", "2-way-join",
        "3-way-join", "4-way-join",       "5-way-join",       "6-way-join",
    };
    return tags;
}

const std::vector<std::string>& application_codes() {
    static const std::vector<std::string> codes = {
        "WC", "MO", "LR", "LP", "GCM", "TPCH", "BI", "SA", "SG", "CA", "SD", "TT", "TM", "AD",
    };
    return codes;
}

bool is_synthetic_structure(const std::string& tag) {
    const auto& tags = synthetic_structure_tags();
    return std::find(tags.begin(), tags.end(), tag) != tags.end();
}

bool is_application_code(const std::string& tag) {
    const auto& codes = application_codes();
    return std::find(codes.begin(), codes.end(), tag) != codes.end();
}

} // namespace pdsp
