#include "dataflow/plan_io.hpp"

#include <fstream>
#include <set>

namespace pdsp {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& context) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw_invalid("unknown field '" + it.key() + "' in " + context);
}

void require_fields(const json& obj, const std::vector<std::string>& required, const std::string& context) {
    for (const auto& f : required)
        if (!obj.contains(f)) throw_invalid("missing field '" + f + "' in " + context);
}

json window_to_json(const WindowSpec& w) {
    json j;
    j["kind"] = w.kind == WindowKind::Sliding ? "sliding" : "tumbling";
    j["policy"] = w.policy == WindowPolicy::Count ? "count" : "time";
    j["length"] = w.length;
    if (w.slide) j["slide"] = *w.slide;
    return j;
}

WindowSpec window_from_json(const json& j) {
    require_fields(j, {"kind", "policy", "length"}, "window");
    reject_unknown(j, {"kind", "policy", "length", "slide"}, "window");
    WindowSpec w;
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "sliding")
        w.kind = WindowKind::Sliding;
    else if (kind == "tumbling")
        w.kind = WindowKind::Tumbling;
    else
        throw_invalid("unknown window kind: " + kind);
    std::string policy = j.at("policy").get<std::string>();
    if (policy == "count")
        w.policy = WindowPolicy::Count;
    else if (policy == "time")
        w.policy = WindowPolicy::Time;
    else
        throw_invalid("unknown window policy: " + policy);
    w.length = j.at("length").get<std::int64_t>();
    if (j.contains("slide")) w.slide = j.at("slide").get<std::int64_t>();
    return w;
}

} // namespace

json value_to_json(const Value& v) {
    json j;
    j["type"] = data_type_name(value_type(v));
    if (auto* i = std::get_if<std::int64_t>(&v))
        j["value"] = *i;
    else if (auto* d = std::get_if<double>(&v))
        j["value"] = *d;
    else
        j["value"] = std::get<std::string>(v);
    return j;
}

Value value_from_json(const json& j) {
    require_fields(j, {"type", "value"}, "literal");
    reject_unknown(j, {"type", "value"}, "literal");
    DataType t = data_type_from_name(j.at("type").get<std::string>());
    switch (t) {
        case DataType::Integer: return Value{j.at("value").get<std::int64_t>()};
        case DataType::Double: return Value{j.at("value").get<double>()};
        case DataType::String: return Value{j.at("value").get<std::string>()};
    }
    throw_invalid("bad literal");
}

json stream_spec_to_json(const StreamSpec& s) {
    json j;
    json schema = json::array();
    for (auto t : s.schema.fields) schema.push_back(data_type_name(t));
    j["schema"] = schema;
    j["event_rate"] = s.event_rate;
    j["arrival"] = arrival_kind_name(s.arrival);
    j["zipf_skew"] = s.zipf_skew;
    j["replay"] = s.replay;
    j["string_pool"] = s.string_pool;
    j["key_cardinality"] = s.key_cardinality;
    return j;
}

StreamSpec stream_spec_from_json(const json& j) {
    require_fields(j, {"schema", "event_rate", "arrival"}, "stream");
    reject_unknown(j, {"schema", "event_rate", "arrival", "zipf_skew", "replay", "string_pool", "key_cardinality"},
                   "stream");
    StreamSpec s;
    for (const auto& t : j.at("schema")) s.schema.fields.push_back(data_type_from_name(t.get<std::string>()));
    s.event_rate = j.at("event_rate").get<double>();
    s.arrival = arrival_kind_from_name(j.at("arrival").get<std::string>());
    if (j.contains("zipf_skew")) s.zipf_skew = j.at("zipf_skew").get<double>();
    if (j.contains("replay")) s.replay = j.at("replay").get<bool>();
    if (j.contains("string_pool")) s.string_pool = j.at("string_pool").get<int>();
    if (j.contains("key_cardinality")) s.key_cardinality = j.at("key_cardinality").get<int>();
    return s;
}

namespace {

json operator_to_json(const OperatorSpec& op) {
    json j;
    j["id"] = op.id;
    j["kind"] = op_kind_name(op.kind);
    j["parallelism"] = op.parallelism;
    json part;
    part["kind"] = partitioning_kind_name(op.inbound.kind);
    if (op.inbound.key_field) part["key"] = *op.inbound.key_field;
    j["partitioning"] = part;
    if (op.filter) {
        json f;
        f["field"] = op.filter->field_index;
        f["fn"] = filter_fn_name(op.filter->fn);
        f["literal"] = value_to_json(op.filter->literal);
        f["selectivity"] = op.filter->estimated_selectivity;
        j["filter"] = f;
    }
    if (op.agg) {
        json a;
        a["fn"] = agg_fn_name(op.agg->fn);
        a["window"] = window_to_json(op.agg->window);
        if (op.agg->key_field) a["key_field"] = *op.agg->key_field;
        if (op.agg->value_field) a["value_field"] = *op.agg->value_field;
        j["agg"] = a;
    }
    if (op.join) {
        json jo;
        jo["window"] = window_to_json(op.join->window);
        jo["left_key"] = op.join->left_key;
        jo["right_key"] = op.join->right_key;
        jo["left"] = op.join->left_op;
        j["join"] = jo;
    }
    if (op.udo) {
        json u;
        u["name"] = op.udo->name;
        u["behavior"] = udo_behavior_name(op.udo->behavior);
        if (!op.udo->params.empty()) u["params"] = op.udo->params;
        j["udo"] = u;
    }
    return j;
}

OperatorSpec operator_from_json(const json& j) {
    require_fields(j, {"id", "kind"}, "operator");
    reject_unknown(j, {"id", "kind", "parallelism", "partitioning", "filter", "agg", "join", "udo"},
                   "operator");
    OperatorSpec op;
    op.id = j.at("id").get<std::string>();
    op.kind = op_kind_from_name(j.at("kind").get<std::string>());
    if (j.contains("parallelism")) op.parallelism = j.at("parallelism").get<int>();
    if (j.contains("partitioning")) {
        const auto& p = j.at("partitioning");
        require_fields(p, {"kind"}, "partitioning of " + op.id);
        reject_unknown(p, {"kind", "key"}, "partitioning of " + op.id);
        op.inbound.kind = partitioning_kind_from_name(p.at("kind").get<std::string>());
        if (p.contains("key")) op.inbound.key_field = p.at("key").get<std::size_t>();
    }
    if (j.contains("filter")) {
        const auto& f = j.at("filter");
        require_fields(f, {"field", "fn", "literal"}, "filter of " + op.id);
        reject_unknown(f, {"field", "fn", "literal", "selectivity"}, "filter of " + op.id);
        FilterSpec fs;
        fs.field_index = f.at("field").get<std::size_t>();
        fs.fn = filter_fn_from_name(f.at("fn").get<std::string>());
        fs.literal = value_from_json(f.at("literal"));
        if (f.contains("selectivity")) fs.estimated_selectivity = f.at("selectivity").get<double>();
        op.filter = fs;
    }
    if (j.contains("agg")) {
        const auto& a = j.at("agg");
        require_fields(a, {"fn", "window"}, "agg of " + op.id);
        reject_unknown(a, {"fn", "window", "key_field", "value_field"}, "agg of " + op.id);
        AggSpec as;
        as.fn = agg_fn_from_name(a.at("fn").get<std::string>());
        as.window = window_from_json(a.at("window"));
        if (a.contains("key_field")) as.key_field = a.at("key_field").get<std::size_t>();
        if (a.contains("value_field")) as.value_field = a.at("value_field").get<std::size_t>();
        op.agg = as;
    }
    if (j.contains("join")) {
        const auto& jo = j.at("join");
        require_fields(jo, {"window", "left_key", "right_key", "left"}, "join of " + op.id);
        reject_unknown(jo, {"window", "left_key", "right_key", "left"}, "join of " + op.id);
        JoinSpec js;
        js.window = window_from_json(jo.at("window"));
        js.left_key = jo.at("left_key").get<std::size_t>();
        js.right_key = jo.at("right_key").get<std::size_t>();
        js.left_op = jo.at("left").get<std::string>();
        op.join = js;
    }
    if (j.contains("udo")) {
        const auto& u = j.at("udo");
        require_fields(u, {"name", "behavior"}, "udo of " + op.id);
        reject_unknown(u, {"name", "behavior", "params"}, "udo of " + op.id);
        UdoSpec us;
        us.name = u.at("name").get<std::string>();
        us.behavior = udo_behavior_from_name(u.at("behavior").get<std::string>());
        if (u.contains("params"))
            us.params = u.at("params").get<std::map<std::string, double>>();
        op.udo = us;
    }
    return op;
}

} // namespace

json plan_to_json(const QueryPlan& plan) {
    json j;
    j["id"] = plan.id;
    j["structure_tag"] = plan.structure_tag;
    json ops = json::array();
    for (const auto& op : plan.operators) ops.push_back(operator_to_json(op));
    j["operators"] = ops;
    json edges = json::array();
    for (const auto& e : plan.edges) edges.push_back({{"from", e.from}, {"to", e.to}});
    j["edges"] = edges;
    json streams = json::object();
    for (const auto& [id, s] : plan.streams) streams[id] = stream_spec_to_json(s);
    j["streams"] = streams;
    j["notes"] = plan.notes;
    return j;
}

QueryPlan plan_from_json(const json& j) {
    require_fields(j, {"id", "structure_tag", "operators", "edges", "streams"}, "plan");
    reject_unknown(j, {"id", "structure_tag", "operators", "edges", "streams", "notes"}, "plan");
    QueryPlan plan;
    plan.id = j.at("id").get<std::string>();
    plan.structure_tag = j.at("structure_tag").get<std::string>();
    for (const auto& op : j.at("operators")) plan.operators.push_back(operator_from_json(op));
    for (const auto& e : j.at("edges")) {
        require_fields(e, {"from", "to"}, "edge");
        reject_unknown(e, {"from", "to"}, "edge");
        plan.edges.push_back(Edge{e.at("from").get<std::string>(), e.at("to").get<std::string>()});
    }
    for (auto it = j.at("streams").begin(); it != j.at("streams").end(); ++it)
        plan.streams[it.key()] = stream_spec_from_json(it.value());
    if (j.contains("notes"))
        plan.notes = j.at("notes").get<std::vector<std::string>>();
    return plan;
}

std::string plan_to_line(const QueryPlan& plan) { return plan_to_json(plan).dump(); }

QueryPlan plan_from_line(const std::string& line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw_invalid(std::string("malformed plan record: ") + e.what());
    }
    try {
        return plan_from_json(j);
    } catch (const json::exception& e) {
        throw_invalid(std::string("malformed plan record: ") + e.what());
    }
}

void write_plan_file(const std::string& path, const std::vector<QueryPlan>& plans) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw_io("cannot open plan file for writing: " + path);
    for (const auto& p : plans) out << plan_to_line(p) << '\n';
    if (!out) throw_io("write failed: " + path);
}

std::vector<QueryPlan> read_plan_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw_io("cannot open plan file: " + path);
    std::vector<QueryPlan> plans;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            plans.push_back(plan_from_line(line));
        } catch (const Error& e) {
            throw Error(e.code(), path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return plans;
}

} // namespace pdsp
