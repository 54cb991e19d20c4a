#include "workload/applications.hpp"

#include "dataflow/validate.hpp"
#include "workload/synthetic.hpp"

namespace pdsp {

// Template registry of real-world application plans. External dependencies of
// the original applications (classifier models, Geo-IP tables, map data) are
// replaced by deterministic stand-in operators with the same cost shape; the
// operator graphs are best-effort reconstructions from the application
// descriptions, one plan per sub-query for the multi-query applications.

const std::vector<ApplicationInfo>& application_registry() {
    static const std::vector<ApplicationInfo> registry = {
        {"WC", "word_count", 1},     {"MO", "machine_outlier", 1}, {"LR", "linear_road", 4},
        {"LP", "logs_processing", 2}, {"GCM", "cloud_monitoring", 2}, {"TPCH", "tpch_orders", 1},
        {"BI", "bargain_index", 1},  {"SA", "sentiment_analysis", 1}, {"SG", "smart_grid", 2},
        {"CA", "click_analytics", 2}, {"SD", "spike_detection", 1},  {"TT", "trending_topics", 1},
        {"TM", "traffic_monitoring", 1}, {"AD", "ad_analytics", 1},
    };
    return registry;
}

namespace {

using gen::random_window;

struct Builder {
    QueryPlan plan;
    const GeneratorConfig& cfg;
    Rng& rng;

    std::string source(const std::string& id, TupleSchema schema, bool replay = true) {
        OperatorSpec op;
        op.id = id;
        op.kind = OpKind::Source;
        plan.operators.push_back(op);
        StreamSpec s;
        s.schema = std::move(schema);
        s.event_rate = rng.pick(cfg.event_rates);
        s.arrival = rng.pick(cfg.arrivals);
        s.zipf_skew = cfg.zipf_skew;
        s.string_pool = cfg.string_pool;
        s.key_cardinality = cfg.key_cardinality;
        s.replay = replay;
        plan.streams[id] = s;
        return id;
    }

    std::string filter(const std::string& id, const std::string& from, FilterSpec spec) {
        OperatorSpec op;
        op.id = id;
        op.kind = OpKind::Filter;
        op.inbound.kind = PartitioningKind::Forward;
        op.filter = std::move(spec);
        plan.operators.push_back(op);
        plan.edges.push_back({from, id});
        return id;
    }

    std::string map(const std::string& id, const std::string& from) {
        OperatorSpec op;
        op.id = id;
        op.kind = OpKind::Map;
        op.inbound.kind = PartitioningKind::Forward;
        plan.operators.push_back(op);
        plan.edges.push_back({from, id});
        return id;
    }

    std::string flat_map(const std::string& id, const std::string& from) {
        OperatorSpec op;
        op.id = id;
        op.kind = OpKind::FlatMap;
        op.inbound.kind = PartitioningKind::Forward;
        plan.operators.push_back(op);
        plan.edges.push_back({from, id});
        return id;
    }

    std::string agg(const std::string& id, const std::string& from, AggFn fn, WindowSpec window,
                    std::optional<std::size_t> key, std::optional<std::size_t> value) {
        OperatorSpec op;
        op.id = id;
        op.kind = OpKind::WindowAggregate;
        if (key) {
            op.inbound.kind = PartitioningKind::Hashing;
            op.inbound.key_field = key;
        } else {
            op.inbound.kind = PartitioningKind::Rebalance;
        }
        op.agg = AggSpec{fn, window, key, value};
        plan.operators.push_back(op);
        plan.edges.push_back({from, id});
        return id;
    }

    std::string join(const std::string& id, const std::string& left, const std::string& right,
                     WindowSpec window, std::size_t left_key, std::size_t right_key) {
        OperatorSpec op;
        op.id = id;
        op.kind = OpKind::WindowJoin;
        op.inbound.kind = PartitioningKind::Hashing;
        op.inbound.key_field = left_key;
        op.join = JoinSpec{window, left_key, right_key, left};
        plan.operators.push_back(op);
        plan.edges.push_back({left, id});
        plan.edges.push_back({right, id});
        return id;
    }

    std::string udo(const std::string& id, const std::string& from, const std::string& name,
                    UdoBehavior behavior, std::map<std::string, double> params,
                    std::optional<std::size_t> hash_key = std::nullopt) {
        OperatorSpec op;
        op.id = id;
        op.kind = OpKind::Udo;
        if (hash_key) {
            op.inbound.kind = PartitioningKind::Hashing;
            op.inbound.key_field = hash_key;
        } else {
            op.inbound.kind = PartitioningKind::Forward;
        }
        op.udo = UdoSpec{name, behavior, std::move(params)};
        plan.operators.push_back(op);
        plan.edges.push_back({from, id});
        return id;
    }

    void sink(const std::string& from) {
        OperatorSpec op;
        op.id = "sink";
        op.kind = OpKind::Sink;
        op.inbound.kind = PartitioningKind::Rebalance;
        plan.operators.push_back(op);
        plan.edges.push_back({from, "sink"});
    }
};

TupleSchema schema(std::initializer_list<DataType> fields) { return TupleSchema{fields}; }

// Informational pass-rate estimate for filters over derived (non-source)
// streams, where sampling the source spec does not apply.
constexpr double kDerivedFilterSelectivity = 0.5;

} // namespace

QueryPlan instantiate_application(const std::string& code, const GeneratorConfig& cfg,
                                  std::uint64_t seed) {
    const ApplicationInfo* info = nullptr;
    for (const auto& a : application_registry())
        if (a.code == code) info = &a;
    if (!info) throw_invalid("unknown application code: " + code);

    Rng rng(mix_seed(seed, 30));
    int variant = cfg.app_variant >= 0 ? cfg.app_variant % info->variants
                                       : static_cast<int>(rng.below(static_cast<std::uint64_t>(info->variants)));

    Builder b{QueryPlan{}, cfg, rng};
    b.plan.structure_tag = code;

    if (code == "WC") {
        // text stream -> tokenize -> per-word count
        auto src = b.source("src", schema({DataType::String}));
        auto fm = b.flat_map("tokenize", src);
        auto a = b.agg("word_count", fm, AggFn::Sum, random_window(cfg, rng, true), 0, std::nullopt);
        b.sink(a);
    } else if (code == "MO") {
        // per-machine usage stream, exact median over a sliding buffer flags outliers
        auto src = b.source("src", schema({DataType::Integer, DataType::Double}));
        double buffer = static_cast<double>(rng.pick(cfg.window_lengths_tuples));
        auto u = b.udo("outlier_detect", src, "bfprt_median_outlier", UdoBehavior::MedianOutlier,
                       {{"value_field", 1.0}, {"window", buffer}, {"threshold", 1.5}}, 0);
        b.sink(u);
    } else if (code == "LR") {
        // vehicle position reports: [segment, speed, vehicle]
        auto src = b.source("src", schema({DataType::Integer, DataType::Double, DataType::Integer}));
        if (variant == 0) {
            auto f = b.filter("slow_vehicles", src,
                              FilterSpec{1, FilterFn::Lt, Value{rng.uniform(2e5, 8e5)},
                                         kDerivedFilterSelectivity});
            auto a = b.agg("toll_per_segment", f, AggFn::Avg, random_window(cfg, rng, true), 0, 1);
            b.sink(a);
        } else if (variant == 1) {
            auto f = b.filter("stopped", src,
                              FilterSpec{1, FilterFn::Le, Value{rng.uniform(1e5, 3e5)},
                                         kDerivedFilterSelectivity});
            auto a = b.agg("stopped_per_segment", f, AggFn::Sum, random_window(cfg, rng, true), 0,
                           std::nullopt);
            auto f2 = b.filter("accident_alert", a,
                               FilterSpec{1, FilterFn::Ge, Value{4.0}, kDerivedFilterSelectivity});
            b.sink(f2);
        } else if (variant == 2) {
            auto a = b.agg("expenditure_per_vehicle", src, AggFn::Sum, random_window(cfg, rng, true), 2, 1);
            b.sink(a);
        } else {
            auto a = b.agg("travel_time_per_segment", src, AggFn::Avg,
                           random_window(cfg, rng, true), 0, 1);
            b.sink(a);
        }
    } else if (code == "LP") {
        // web server log records: [status, url, bytes]
        auto src = b.source("src", schema({DataType::Integer, DataType::String, DataType::Integer}));
        if (variant == 0) {
            auto a = b.agg("visits_per_url", src, AggFn::Sum, random_window(cfg, rng, true), 1,
                           std::nullopt);
            b.sink(a);
        } else {
            auto a = b.agg("status_tally", src, AggFn::Sum, random_window(cfg, rng, true), 0,
                           std::nullopt);
            b.sink(a);
        }
    } else if (code == "GCM") {
        // machine events: [job, category, cpu]
        auto src = b.source("src", schema({DataType::Integer, DataType::Integer, DataType::Double}));
        WindowSpec w = random_window(cfg, rng, true);
        if (w.kind != WindowKind::Sliding) {
            w.kind = WindowKind::Sliding;
            w.slide = std::max<std::int64_t>(1, w.length / 2);
        }
        auto a = b.agg("avg_cpu", src, AggFn::Avg, w, variant == 0 ? 0 : 1, 2);
        b.sink(a);
    } else if (code == "TPCH") {
        // order events: [priority, orderkey, amount]
        auto src = b.source("src", schema({DataType::Integer, DataType::Integer, DataType::Double}));
        auto f = b.filter("high_priority", src,
                          FilterSpec{0, FilterFn::Le,
                                     Value{std::int64_t{1 + static_cast<std::int64_t>(rng.below(3))}},
                                     kDerivedFilterSelectivity});
        auto a = b.agg("priority_counts", f, AggFn::Sum, random_window(cfg, rng, true), 0, std::nullopt);
        b.sink(a);
    } else if (code == "BI") {
        // stock quotes: [symbol, price, volume]
        auto src = b.source("src", schema({DataType::Integer, DataType::Double, DataType::Double}));
        WindowSpec w = random_window(cfg, rng, true);
        auto a = b.agg("vwap", src, AggFn::Avg, w, 0, 1);
        auto f = b.filter("bargain", a,
                          FilterSpec{1, FilterFn::Gt, Value{rng.uniform(4e5, 6e5)},
                                     kDerivedFilterSelectivity});
        b.sink(f);
    } else if (code == "SA") {
        // tweets scored by a fixed keyword table
        auto src = b.source("src", schema({DataType::String}));
        auto u = b.udo("sentiment", src, "keyword_sentiment", UdoBehavior::SentimentScore,
                       {{"field", 0.0}});
        b.sink(u);
    } else if (code == "SG") {
        // smart plug load readings: [house, plug, load]
        auto src = b.source("src", schema({DataType::Integer, DataType::Integer, DataType::Double}));
        WindowSpec w = random_window(cfg, rng, true);
        if (w.kind != WindowKind::Sliding) {
            w.kind = WindowKind::Sliding;
            w.slide = std::max<std::int64_t>(1, w.length / 2);
        }
        if (variant == 0) {
            // global average load: non-keyed window, runs single-instance
            auto a = b.agg("global_avg_load", src, AggFn::Avg, w, std::nullopt, 2);
            b.sink(a);
        } else {
            auto a = b.agg("local_avg_load", src, AggFn::Avg, w, 0, 2);
            b.sink(a);
        }
    } else if (code == "CA") {
        // click events: [client, ip, url]
        auto src = b.source("src", schema({DataType::Integer, DataType::Integer, DataType::String}));
        if (variant == 0) {
            auto a = b.agg("visits_per_client", src, AggFn::Sum, random_window(cfg, rng, true), 0,
                           std::nullopt);
            b.sink(a);
        } else {
            auto u = b.udo("geo_lookup", src, "geo_bucket", UdoBehavior::GeoBucket,
                           {{"field", 1.0}, {"buckets", 256.0}});
            auto a = b.agg("visits_per_region", u, AggFn::Sum, random_window(cfg, rng, true), 3,
                           std::nullopt);
            b.sink(a);
        }
    } else if (code == "SD") {
        // sensor readings: [device, temperature]; flag windows 3% above the
        // domain average
        auto src = b.source("src", schema({DataType::Integer, DataType::Double}));
        WindowSpec w = random_window(cfg, rng, true);
        if (w.kind != WindowKind::Sliding && w.policy == WindowPolicy::Time) {
            w.kind = WindowKind::Sliding;
            w.slide = std::max<std::int64_t>(1, w.length / 2);
        }
        auto a = b.agg("avg_temperature", src, AggFn::Avg, w, 0, 1);
        auto f = b.filter("spike", a,
                          FilterSpec{1, FilterFn::Gt, Value{1.03 * kDoubleDomain / 2.0},
                                     kDerivedFilterSelectivity});
        b.sink(f);
    } else if (code == "TT") {
        // tweets -> topics -> windowed counts -> threshold
        auto src = b.source("src", schema({DataType::String}));
        auto fm = b.flat_map("topic_extract", src);
        auto a = b.agg("topic_counts", fm, AggFn::Sum, random_window(cfg, rng, true), 0, std::nullopt);
        double threshold = 2.0 + static_cast<double>(rng.below(4));
        auto u = b.udo("trending", a, "topic_threshold", UdoBehavior::TopicThreshold,
                       {{"field", 1.0}, {"threshold", threshold}});
        b.sink(u);
    } else if (code == "TM") {
        // vehicle telemetry: [vehicle, x, y, speed]
        auto src = b.source("src", schema({DataType::Integer, DataType::Double, DataType::Double,
                                           DataType::Double}));
        auto u = b.udo("road_match", src, "road_match", UdoBehavior::RoadMatch,
                       {{"x_field", 1.0}, {"y_field", 2.0}, {"grid", 100000.0}});
        auto a = b.agg("avg_speed_per_segment", u, AggFn::Avg, random_window(cfg, rng, true), 4, 3);
        b.sink(a);
    } else if (code == "AD") {
        // click and impression branches, per-branch windowed counts, join on
        // campaign, rolling click-through rate
        auto clicks = b.source("clicks", schema({DataType::Integer, DataType::Integer}));
        auto imps = b.source("impressions", schema({DataType::Integer, DataType::Integer}));
        auto cp = b.map("click_parse", clicks);
        auto ip = b.map("impression_parse", imps);
        std::int64_t w_ms = rng.pick(cfg.window_durations_ms);
        WindowSpec count_window{WindowKind::Tumbling, WindowPolicy::Time, w_ms, std::nullopt};
        auto ca = b.agg("click_counts", cp, AggFn::Sum, count_window, 0, std::nullopt);
        auto ia = b.agg("impression_counts", ip, AggFn::Sum, count_window, 0, std::nullopt);
        WindowSpec join_window{WindowKind::Tumbling, WindowPolicy::Time, w_ms, std::nullopt};
        auto j = b.join("ctr_join", ca, ia, join_window, 0, 0);
        auto u = b.udo("rolling_ctr", j, "rolling_ctr", UdoBehavior::RollingCtr,
                       {{"key_field", 0.0}, {"num_field", 1.0}, {"den_field", 4.0}, {"alpha", 0.5}}, 0);
        b.sink(u);
    } else {
        throw_invalid("application " + code + " has no template");
    }

    b.plan.id = code + "-v" + std::to_string(variant) + "-" + std::to_string(seed);
    require_valid(b.plan);
    return b.plan;
}

} // namespace pdsp
