#include "workload/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "dataflow/tuple.hpp"
#include "dataflow/validate.hpp"
#include "workload/selectivity.hpp"

namespace pdsp {

namespace gen {

StreamSpec random_stream(const GeneratorConfig& cfg, Rng& rng, bool integer_key) {
    StreamSpec s;
    int width = static_cast<int>(rng.uniform_int(cfg.min_tuple_width, cfg.max_tuple_width + 1));
    s.schema.fields.reserve(static_cast<std::size_t>(width));
    for (int f = 0; f < width; ++f) {
        if (f == 0 && integer_key) {
            s.schema.fields.push_back(DataType::Integer);
            continue;
        }
        switch (rng.below(3)) {
            case 0: s.schema.fields.push_back(DataType::Integer); break;
            case 1: s.schema.fields.push_back(DataType::Double); break;
            default: s.schema.fields.push_back(DataType::String); break;
        }
    }
    s.event_rate = rng.pick(cfg.event_rates);
    s.arrival = rng.pick(cfg.arrivals);
    s.zipf_skew = cfg.zipf_skew;
    s.string_pool = cfg.string_pool;
    s.key_cardinality = cfg.key_cardinality;
    return s;
}

WindowSpec random_window(const GeneratorConfig& cfg, Rng& rng, bool time_only) {
    WindowSpec w;
    w.policy = time_only || rng.chance(0.5) ? WindowPolicy::Time : WindowPolicy::Count;
    w.length = w.policy == WindowPolicy::Time ? rng.pick(cfg.window_durations_ms)
                                              : rng.pick(cfg.window_lengths_tuples);
    if (rng.chance(0.5)) {
        w.kind = WindowKind::Sliding;
        double ratio = rng.pick(cfg.slide_ratios);
        w.slide = std::max<std::int64_t>(1, std::llround(ratio * static_cast<double>(w.length)));
    } else {
        w.kind = WindowKind::Tumbling;
    }
    return w;
}

namespace {

// (field, function) pairs able to clear the default selectivity floor given
// the harness value domains. Equality needs a low-cardinality domain, which
// only the integer key field (field 0) provides; prefix/suffix predicates use
// pool strings so a match always exists.
struct FilterCandidate {
    std::size_t field;
    FilterFn fn;
};

std::vector<FilterCandidate> candidates_for(const TupleSchema& schema, int key_cardinality,
                                            double floor, bool exclude_field0) {
    std::vector<FilterCandidate> out;
    for (std::size_t f = 0; f < schema.width(); ++f) {
        if (exclude_field0 && f == 0) continue;
        switch (schema.fields[f]) {
            case DataType::Integer: {
                for (FilterFn fn : {FilterFn::Le, FilterFn::Ge, FilterFn::Lt, FilterFn::Gt, FilterFn::Ne})
                    out.push_back({f, fn});
                bool low_cardinality = f == 0 && key_cardinality > 0 &&
                                       1.0 / static_cast<double>(key_cardinality) >= floor;
                if (low_cardinality) out.push_back({f, FilterFn::Eq});
                break;
            }
            case DataType::Double:
                for (FilterFn fn : {FilterFn::Le, FilterFn::Ge, FilterFn::Lt, FilterFn::Gt, FilterFn::Ne})
                    out.push_back({f, fn});
                break;
            case DataType::String:
                for (FilterFn fn : {FilterFn::Le, FilterFn::Ge, FilterFn::Lt, FilterFn::Gt, FilterFn::Ne,
                                    FilterFn::StartsWith, FilterFn::EndsWith, FilterFn::StartsNotWith,
                                    FilterFn::EndsNotWith})
                    out.push_back({f, fn});
                break;
        }
    }
    return out;
}

Value propose_literal(const FilterCandidate& cand, const StreamSpec& stream,
                      const std::vector<std::string>& pool, Rng& rng) {
    DataType t = stream.schema.fields[cand.field];
    switch (t) {
        case DataType::Integer: {
            std::int64_t domain = cand.field == 0 ? stream.key_cardinality : kIntDomain;
            return Value{rng.uniform_int(0, domain)};
        }
        case DataType::Double:
            return Value{rng.uniform(0.0, kDoubleDomain)};
        case DataType::String: {
            const std::string& base = pool[rng.below(pool.size())];
            switch (cand.fn) {
                case FilterFn::StartsWith:
                case FilterFn::EndsWith:
                    // length-1 affix: wide enough to clear the floor
                    return cand.fn == FilterFn::StartsWith ? Value{base.substr(0, 1)}
                                                           : Value{base.substr(base.size() - 1)};
                case FilterFn::StartsNotWith:
                case FilterFn::EndsNotWith: {
                    std::size_t len = 1 + rng.below(2);
                    return cand.fn == FilterFn::StartsNotWith ? Value{base.substr(0, len)}
                                                              : Value{base.substr(base.size() - len)};
                }
                default:
                    return Value{base};
            }
        }
    }
    throw_invalid("unhandled literal type");
}

} // namespace

FilterSpec random_filter(const StreamSpec& stream, const GeneratorConfig& cfg, Rng& rng,
                         std::uint64_t sel_seed, const std::string& op_id, bool exclude_field0) {
    auto cands = candidates_for(stream.schema, stream.key_cardinality, cfg.min_filter_selectivity,
                                exclude_field0);
    if (cands.empty())
        throw Error(ErrorCode::Generation, "no admissible filter for operator " + op_id);

    StreamGenerator pool_source(stream, sel_seed);
    const auto& pool = pool_source.string_pool();

    for (std::size_t attempt = 0; attempt < cfg.rejection_budget; ++attempt) {
        const auto& cand = cands[rng.below(cands.size())];
        FilterSpec f;
        f.field_index = cand.field;
        f.fn = cand.fn;
        f.literal = propose_literal(cand, stream, pool, rng);
        auto est = estimate_selectivity(f, stream, mix_seed(sel_seed, attempt), cfg.selectivity_sample);
        if (est.value > 0.0 && est.value >= cfg.min_filter_selectivity) {
            f.estimated_selectivity = est.value;
            return f;
        }
    }
    throw Error(ErrorCode::Generation,
                "exhausted " + std::to_string(cfg.rejection_budget) +
                    " literal draws for filter operator " + op_id);
}

AggSpec random_agg(const TupleSchema& input, std::size_t key_field, const GeneratorConfig& cfg, Rng& rng) {
    AggSpec a;
    a.fn = rng.pick(cfg.agg_functions);
    a.window = random_window(cfg, rng, /*time_only=*/false);
    a.key_field = key_field;
    std::vector<std::size_t> numeric;
    for (std::size_t f = 0; f < input.width(); ++f)
        if (f != key_field && input.fields[f] != DataType::String) numeric.push_back(f);
    if (!numeric.empty()) a.value_field = numeric[rng.below(numeric.size())];
    return a;
}

} // namespace gen

namespace {

using gen::random_agg;
using gen::random_filter;
using gen::random_stream;
using gen::random_window;

QueryPlan build_linear_family(const std::string& tag, int filter_count, const GeneratorConfig& cfg,
                              std::uint64_t seed) {
    Rng rng(mix_seed(seed, 10));
    QueryPlan plan;
    plan.structure_tag = tag;

    StreamSpec stream = random_stream(cfg, rng, /*integer_key=*/true);
    auto src = OperatorSpec{};
    src.id = "src0";
    src.kind = OpKind::Source;
    plan.operators.push_back(src);
    plan.streams["src0"] = stream;

    std::string prev = "src0";
    int next_id = 1;
    for (int i = 0; i < filter_count; ++i) {
        OperatorSpec f;
        f.id = "filter" + std::to_string(next_id++);
        f.kind = OpKind::Filter;
        f.inbound.kind = PartitioningKind::Forward;
        f.filter = random_filter(stream, cfg, rng, mix_seed(seed, 100 + i), f.id);
        plan.edges.push_back({prev, f.id});
        prev = f.id;
        plan.operators.push_back(f);
    }

    OperatorSpec agg;
    agg.id = "agg" + std::to_string(next_id++);
    agg.kind = OpKind::WindowAggregate;
    agg.inbound.kind = PartitioningKind::Hashing;
    agg.inbound.key_field = 0;
    agg.agg = random_agg(stream.schema, 0, cfg, rng);
    plan.edges.push_back({prev, agg.id});
    plan.operators.push_back(agg);

    OperatorSpec sink;
    sink.id = "sink" + std::to_string(next_id);
    sink.kind = OpKind::Sink;
    sink.inbound.kind = PartitioningKind::Rebalance;
    plan.edges.push_back({agg.id, sink.id});
    plan.operators.push_back(sink);
    return plan;
}

QueryPlan build_join_family(const std::string& tag, int way, const GeneratorConfig& cfg,
                            std::uint64_t seed) {
    Rng rng(mix_seed(seed, 20));
    QueryPlan plan;
    plan.structure_tag = tag;

    // k sources with a shared integer key domain, one filter per source,
    // then a left-deep tree of k-1 binary joins.
    WindowSpec join_window = random_window(cfg, rng, /*time_only=*/true);
    int next_id = 0;
    std::vector<std::string> filter_ids;
    std::vector<TupleSchema> filter_schemas;
    for (int s = 0; s < way; ++s) {
        StreamSpec stream = random_stream(cfg, rng, /*integer_key=*/true);
        while (stream.schema.width() < 2) stream = random_stream(cfg, rng, /*integer_key=*/true);
        OperatorSpec src;
        src.id = "src" + std::to_string(next_id++);
        src.kind = OpKind::Source;
        plan.operators.push_back(src);
        plan.streams[src.id] = stream;

        OperatorSpec f;
        f.id = "filter" + std::to_string(next_id++);
        f.kind = OpKind::Filter;
        f.inbound.kind = PartitioningKind::Forward;
        f.filter = random_filter(stream, cfg, rng, mix_seed(seed, 200 + s), f.id,
                                 /*exclude_field0=*/true);
        plan.edges.push_back({src.id, f.id});
        plan.operators.push_back(f);
        filter_ids.push_back(f.id);
        filter_schemas.push_back(stream.schema);
    }

    std::string left = filter_ids[0];
    TupleSchema left_schema = filter_schemas[0];
    std::size_t left_key = 0;
    for (int j = 1; j < way; ++j) {
        OperatorSpec join;
        join.id = "join" + std::to_string(next_id++);
        join.kind = OpKind::WindowJoin;
        join.inbound.kind = PartitioningKind::Hashing;
        join.inbound.key_field = left_key; // key position is shared by construction
        join.join = JoinSpec{join_window, left_key, 0, left};
        plan.edges.push_back({left, join.id});
        plan.edges.push_back({filter_ids[static_cast<std::size_t>(j)], join.id});
        plan.operators.push_back(join);

        TupleSchema combined = left_schema;
        const auto& rs = filter_schemas[static_cast<std::size_t>(j)];
        combined.fields.insert(combined.fields.end(), rs.fields.begin(), rs.fields.end());
        left_schema = combined;
        left = join.id;
        // the original left key column keeps its position in the concatenation
    }

    OperatorSpec sink;
    sink.id = "sink" + std::to_string(next_id);
    sink.kind = OpKind::Sink;
    sink.inbound.kind = PartitioningKind::Rebalance;
    plan.edges.push_back({left, sink.id});
    plan.operators.push_back(sink);
    return plan;
}

} // namespace

std::string normalize_structure_tag(const std::string& tag) {
    std::string out = tag;
    std::replace(out.begin(), out.end(), ' ', '-');
    return out;
}

QueryPlan generate_synthetic_plan(const std::string& structure_tag, const GeneratorConfig& cfg,
                                  std::uint64_t seed) {
    std::string tag = normalize_structure_tag(structure_tag);
    if (!is_synthetic_structure(tag))
        throw_invalid("unknown synthetic structure: " + structure_tag);

    QueryPlan plan;
    if (tag == "linear")
        plan = build_linear_family(tag, 1, cfg, seed);
    else if (tag == "2-chained-filter")
        plan = build_linear_family(tag, 2, cfg, seed);
    else if (tag == "3-chained-filter")
        plan = build_linear_family(tag, 3, cfg, seed);
    else if (tag == "4-chained-filter")
        plan = build_linear_family(tag, 4, cfg, seed);
    else {
        int way = tag[0] - '0';
        plan = build_join_family(tag, way, cfg, seed);
    }
    plan.id = tag + "-" + std::to_string(seed);
    require_valid(plan);
    return plan;
}

} // namespace pdsp
