#include "doctest.h"

#include <cmath>
#include <map>
#include <set>

#include "dataflow/tuple.hpp"
#include "dataflow/plan_io.hpp"
#include "dataflow/validate.hpp"
#include "workload/applications.hpp"
#include "workload/generator.hpp"
#include "workload/selectivity.hpp"
#include "workload/stream.hpp"
#include "helpers.hpp"

using namespace pdsp;
using namespace pdsp::testing;

namespace {

GeneratorConfig quick_config() {
    GeneratorConfig cfg;
    cfg.selectivity_sample = 2000; // keep unit tests snappy; acceptance uses the default
    return cfg;
}

} // namespace

TEST_CASE("uniform arrivals space tuples evenly") {
    StreamSpec s;
    s.schema.fields = {DataType::Integer};
    s.event_rate = 10.0;
    s.arrival = ArrivalKind::Uniform;
    auto tuples = generate_stream_for(s, 7, 1e6); // one second
    REQUIRE(tuples.size() == 10);
    for (std::size_t i = 0; i < tuples.size(); ++i)
        CHECK(tuples[i].event_ts == doctest::Approx(1e5 * static_cast<double>(i)));
}

TEST_CASE("poisson sampler hits the configured rate") {
    StreamSpec s;
    s.schema.fields = {DataType::Integer};
    s.event_rate = 1000.0;
    s.arrival = ArrivalKind::Poisson;
    const std::size_t n = 400000;
    auto tuples = generate_stream(s, 42, n);
    double mean_gap = tuples.back().event_ts / static_cast<double>(n - 1);
    CHECK(mean_gap == doctest::Approx(1000.0).epsilon(0.05)); // 1 ms +- 5%

    // index of dispersion of per-second counts
    std::map<std::int64_t, std::size_t> counts;
    for (const auto& t : tuples) counts[static_cast<std::int64_t>(t.event_ts / 1e6)]++;
    counts.erase(std::prev(counts.end())); // drop the ragged final second
    double mean = 0, var = 0;
    for (auto& [sec, c] : counts) mean += static_cast<double>(c);
    mean /= static_cast<double>(counts.size());
    for (auto& [sec, c] : counts) var += (static_cast<double>(c) - mean) * (static_cast<double>(c) - mean);
    var /= static_cast<double>(counts.size());
    double dispersion = var / mean;
    CHECK(dispersion > 0.9);
    CHECK(dispersion < 1.1);
}

TEST_CASE("stream generation is a pure function of spec and seed") {
    auto spec = int_double_stream(5000.0, ArrivalKind::Poisson);
    auto a = generate_stream(spec, 99, 500);
    auto b = generate_stream(spec, 99, 500);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(tuple_canonical(a[i]) == tuple_canonical(b[i]));
        CHECK(a[i].event_ts == b[i].event_ts);
    }
    auto c = generate_stream(spec, 100, 500);
    bool any_diff = false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (tuple_canonical(a[i]) != tuple_canonical(c[i])) any_diff = true;
    CHECK(any_diff);
}

TEST_CASE("replayed streams cycle their value sequence") {
    StreamSpec s;
    s.schema.fields = {DataType::Integer, DataType::String};
    s.event_rate = 1000.0;
    s.replay = true;
    StreamGenerator gen(s, 5);
    std::vector<Tuple> first;
    for (std::size_t i = 0; i < kReplayPeriod; ++i) first.push_back(gen.next());
    Tuple wrapped = gen.next();
    CHECK(wrapped.values == first[0].values);
    CHECK(wrapped.event_ts > first.back().event_ts);
}

TEST_CASE("zipf value frequencies are rank-monotone") {
    StreamSpec s;
    s.schema.fields = {DataType::Integer};
    s.event_rate = 1000.0;
    s.arrival = ArrivalKind::Zipf;
    s.zipf_skew = 2.0;
    s.key_cardinality = 10;
    auto tuples = generate_stream(s, 11, 100000);
    std::vector<std::size_t> freq(10, 0);
    for (const auto& t : tuples) freq[static_cast<std::size_t>(std::get<std::int64_t>(t.values[0]))]++;
    for (std::size_t r = 1; r < freq.size(); ++r) CHECK(freq[r - 1] >= freq[r]);
    CHECK(freq[0] > freq[5]);
}

TEST_CASE("selectivity estimates match brute-force expectations") {
    StreamSpec s;
    s.schema.fields = {DataType::Integer, DataType::Integer};
    s.event_rate = 1000.0;
    // field 1 draws from the full integer domain
    SUBCASE("x != x0 over a wide domain is nearly 1") {
        FilterSpec f{1, FilterFn::Ne, Value{std::int64_t{123456}}, 1.0};
        auto est = estimate_selectivity(f, s, 3, 10000);
        CHECK(est.value >= 0.99);
        CHECK(est.sample_size == 10000);
    }
    SUBCASE("x < domain minimum is empty") {
        FilterSpec f{1, FilterFn::Lt, Value{std::int64_t{0}}, 1.0};
        auto est = estimate_selectivity(f, s, 3, 10000);
        CHECK(est.value == 0.0);
    }
    SUBCASE("x >= domain minimum is universal") {
        FilterSpec f{1, FilterFn::Ge, Value{std::int64_t{0}}, 1.0};
        auto est = estimate_selectivity(f, s, 3, 10000);
        CHECK(est.value == 1.0);
    }
    SUBCASE("deterministic for fixed inputs") {
        FilterSpec f{1, FilterFn::Lt, Value{std::int64_t{400000}}, 1.0};
        auto a = estimate_selectivity(f, s, 17, 5000);
        auto b = estimate_selectivity(f, s, 17, 5000);
        CHECK(a.value == b.value);
    }
    SUBCASE("incompatible filter is rejected") {
        FilterSpec f{0, FilterFn::StartsWith, Value{std::string("a")}, 1.0};
        CHECK_THROWS_AS(estimate_selectivity(f, s, 3, 100), Error);
    }
}

TEST_CASE("synthetic structures have the documented shapes") {
    auto cfg = quick_config();

    auto count_kinds = [](const QueryPlan& plan) {
        std::map<OpKind, int> k;
        for (const auto& op : plan.operators) k[op.kind]++;
        return k;
    };

    SUBCASE("linear") {
        auto plan = generate_synthetic_plan("linear", cfg, 5);
        auto k = count_kinds(plan);
        CHECK(k[OpKind::Source] == 1);
        CHECK(k[OpKind::Filter] == 1);
        CHECK(k[OpKind::WindowAggregate] == 1);
        CHECK(k[OpKind::Sink] == 1);
        CHECK(validate_plan(plan).ok());
    }
    SUBCASE("2-way join matches the reference layout") {
        auto plan = generate_synthetic_plan("2-way join", cfg, 5); // space form accepted
        auto k = count_kinds(plan);
        CHECK(k[OpKind::Source] == 2);
        CHECK(k[OpKind::Filter] == 2);
        CHECK(k[OpKind::WindowJoin] == 1);
        CHECK(k[OpKind::Sink] == 1);
    }
    SUBCASE("6-way join is a left-deep tree of 5 binary joins") {
        auto plan = generate_synthetic_plan("6-way-join", cfg, 5);
        auto k = count_kinds(plan);
        CHECK(k[OpKind::Source] == 6);
        CHECK(k[OpKind::WindowJoin] == 5);
    }
    SUBCASE("chained filters") {
        auto plan = generate_synthetic_plan("4-chained-filter", cfg, 6);
        CHECK(count_kinds(plan)[OpKind::Filter] == 4);
    }
    SUBCASE("unknown structure rejected") {
        CHECK_THROWS_AS(generate_synthetic_plan("7-way-join", cfg, 5), Error);
    }
}

TEST_CASE("every application template instantiates to a valid plan") {
    auto cfg = quick_config();
    for (const auto& app : application_registry()) {
        for (int v = 0; v < app.variants; ++v) {
            GeneratorConfig c = cfg;
            c.app_variant = v;
            auto plan = instantiate_application(app.code, c, 77);
            auto report = validate_plan(plan);
            CHECK_MESSAGE(report.ok(), app.code, " v", v, ": ", report.joined());
            CHECK(plan.structure_tag == app.code);
        }
    }
    CHECK_THROWS_AS(instantiate_application("ZZ", cfg, 1), Error);
}

TEST_CASE("AD template has the expected branches") {
    auto cfg = quick_config();
    auto plan = instantiate_application("AD", cfg, 9);
    CHECK(plan.find_op("click_parse") != nullptr);
    CHECK(plan.find_op("impression_parse") != nullptr);
    CHECK(plan.find_op("click_counts") != nullptr);
    CHECK(plan.find_op("impression_counts") != nullptr);
    CHECK(plan.find_op("ctr_join") != nullptr);
    CHECK(plan.find_op("rolling_ctr") != nullptr);
    CHECK(plan.streams.size() == 2);
}

TEST_CASE("WC template shape") {
    auto cfg = quick_config();
    auto plan = instantiate_application("WC", cfg, 9);
    CHECK(plan.find_op("tokenize")->kind == OpKind::FlatMap);
    CHECK(plan.find_op("word_count")->kind == OpKind::WindowAggregate);
    // keyed by the word itself
    CHECK(plan.find_op("word_count")->agg->key_field == std::size_t{0});
}

TEST_CASE("SD template filters on the windowed average") {
    auto cfg = quick_config();
    auto plan = instantiate_application("SD", cfg, 9);
    auto* f = plan.find_op("spike");
    REQUIRE(f != nullptr);
    CHECK(f->filter->field_index == 1); // aggregate value position
    CHECK(std::get<double>(f->filter->literal) == doctest::Approx(1.03 * 500000.0));
}

TEST_CASE("corpus generation round-robins and is deterministic") {
    auto cfg = quick_config();
    cfg.structures = synthetic_structure_tags();
    cfg.count = 9;
    cfg.seed = 31;
    auto plans = generate_corpus(cfg);
    REQUIRE(plans.size() == 9);
    std::set<std::string> tags;
    for (const auto& p : plans) tags.insert(p.structure_tag);
    CHECK(tags.size() == 9);

    auto again = generate_corpus(cfg);
    for (std::size_t i = 0; i < plans.size(); ++i)
        CHECK(plan_to_line(plans[i]) == plan_to_line(again[i]));
}

TEST_CASE("generated plans validate and filters clear the selectivity floor") {
    auto cfg = quick_config();
    cfg.structures = {"linear", "3-chained-filter", "2-way-join"};
    cfg.count = 30;
    cfg.seed = 404;
    auto plans = generate_corpus(cfg);
    for (const auto& plan : plans) {
        auto report = validate_plan(plan);
        REQUIRE_MESSAGE(report.ok(), plan.id, ": ", report.joined());
        for (const auto& op : plan.operators) {
            if (op.kind != OpKind::Filter) continue;
            // fresh sample, different seed stream than generation used
            const auto* src = upstream_source_of(plan, op.id);
            REQUIRE(src != nullptr);
            auto stream_it = plan.streams.find(src->id);
            REQUIRE(stream_it != plan.streams.end());
            auto est = estimate_selectivity(*op.filter, stream_it->second, 987654, 10000);
            CHECK_MESSAGE(est.value > 0.0, plan.id, " ", op.id);
        }
    }
}

TEST_CASE("generator config round-trips through json") {
    GeneratorConfig cfg;
    cfg.seed = 123;
    cfg.count = 7;
    cfg.structures = {"linear", "AD"};
    cfg.event_rates = {100, 1000};
    auto j = generator_config_to_json(cfg);
    auto back = generator_config_from_json(j);
    CHECK(back.seed == cfg.seed);
    CHECK(back.count == cfg.count);
    CHECK(back.structures == cfg.structures);
    CHECK(back.event_rates == cfg.event_rates);

    j["bogus_key"] = 1;
    CHECK_THROWS_AS(generator_config_from_json(j), Error);

    auto j2 = generator_config_to_json(cfg);
    j2["structures"] = {"nonexistent"};
    CHECK_THROWS_AS(generator_config_from_json(j2), Error);
}

TEST_CASE("stream generation rejects non-positive rate and duration") {
    StreamSpec s;
    s.schema.fields = {DataType::Integer};
    s.event_rate = 0.0;
    CHECK_THROWS_AS(generate_stream(s, 1, 10), Error);
    s.event_rate = -5.0;
    CHECK_THROWS_AS(generate_stream(s, 1, 10), Error);
    s.event_rate = 100.0;
    CHECK_THROWS_AS(generate_stream_for(s, 1, 0.0), Error);
    CHECK_THROWS_AS(generate_stream_for(s, 1, -1.0), Error);
    CHECK_THROWS_AS(generate_stream(s, 1, 0), Error);
}
