#include "doctest.h"

#include <algorithm>
#include <set>

#include "dataflow/physical.hpp"
#include "dataflow/plan_io.hpp"
#include "dataflow/tuple.hpp"
#include "dataflow/validate.hpp"
#include "helpers.hpp"

using namespace pdsp;
using namespace pdsp::testing;

TEST_CASE("minimal linear plan validates") {
    auto plan = linear_plan();
    auto report = validate_plan(plan);
    CHECK_MESSAGE(report.ok(), report.joined());
}

TEST_CASE("cycle is reported as not a DAG") {
    QueryPlan plan;
    plan.id = "cyclic";
    plan.structure_tag = "linear";
    plan.operators.push_back(make_source("src0"));
    auto f1 = make_filter("f1", 0, FilterFn::Ge, Value{std::int64_t{0}}, 1.0);
    auto f2 = make_filter("f2", 0, FilterFn::Ge, Value{std::int64_t{0}}, 1.0);
    f2.inbound.kind = PartitioningKind::Rebalance;
    f1.inbound.kind = PartitioningKind::Rebalance;
    plan.operators.push_back(f1);
    plan.operators.push_back(f2);
    plan.operators.push_back(make_sink("sink"));
    plan.edges = {{"src0", "f1"}, {"f1", "f2"}, {"f2", "f1"}, {"f2", "sink"}};
    plan.streams["src0"] = int_double_stream();
    auto report = validate_plan(plan);
    CHECK_FALSE(report.ok());
    bool mentions_dag = std::any_of(report.violations.begin(), report.violations.end(),
                                    [](const std::string& v) { return v.find("not a DAG") != std::string::npos; });
    CHECK(mentions_dag);
}

TEST_CASE("forward edge with unequal parallelism is a violation") {
    auto plan = linear_plan();
    plan.find_op("filter1")->parallelism = 2;
    auto* agg = plan.find_op("agg2");
    agg->parallelism = 4;
    auto report = validate_plan(plan);
    // agg inbound is hashing; force the violation on the filter edge instead
    plan.find_op("filter1")->inbound.kind = PartitioningKind::Forward;
    plan.find_op("src0")->parallelism = 2;
    report = validate_plan(plan);
    CHECK(report.ok());

    plan.find_op("src0")->parallelism = 2;
    plan.find_op("filter1")->parallelism = 4;
    report = validate_plan(plan);
    CHECK_FALSE(report.ok());
    bool mentions_forward =
        std::any_of(report.violations.begin(), report.violations.end(), [](const std::string& v) {
            return v.find("forward requires equal parallelism") != std::string::npos;
        });
    CHECK(mentions_forward);
}

TEST_CASE("validation flags missing pieces with operator ids") {
    auto plan = linear_plan();
    plan.streams.clear();
    auto report = validate_plan(plan);
    CHECK_FALSE(report.ok());
    CHECK(report.joined().find("src0") != std::string::npos);
}

TEST_CASE("stateful operators with parallelism > 1 need hashing") {
    auto plan = linear_plan();
    auto* agg = plan.find_op("agg2");
    agg->inbound.kind = PartitioningKind::Rebalance;
    agg->inbound.key_field.reset();
    agg->agg->key_field.reset();
    agg->parallelism = 2;
    auto report = validate_plan(plan);
    CHECK_FALSE(report.ok());
    CHECK(report.joined().find("requires hashing") != std::string::npos);
}

TEST_CASE("validate_plan is idempotent and side-effect free") {
    auto plan = linear_plan();
    auto before = plan_to_line(plan);
    auto r1 = validate_plan(plan);
    auto r2 = validate_plan(plan);
    CHECK(r1.violations == r2.violations);
    CHECK(plan_to_line(plan) == before);
}

TEST_CASE("parallelism categories match the table boundaries") {
    CHECK(categorize_parallelism(1) == ParallelismCategory::XS);
    CHECK(categorize_parallelism(7) == ParallelismCategory::XS);
    CHECK(categorize_parallelism(8) == ParallelismCategory::S);
    CHECK(categorize_parallelism(15) == ParallelismCategory::S);
    CHECK(categorize_parallelism(16) == ParallelismCategory::M);
    CHECK(categorize_parallelism(31) == ParallelismCategory::M);
    CHECK(categorize_parallelism(32) == ParallelismCategory::L);
    CHECK(categorize_parallelism(63) == ParallelismCategory::L);
    CHECK(categorize_parallelism(64) == ParallelismCategory::XL);
    CHECK(categorize_parallelism(127) == ParallelismCategory::XL);
    CHECK(categorize_parallelism(128) == ParallelismCategory::XXL);
    CHECK(categorize_parallelism(500) == ParallelismCategory::XXL);
    CHECK_THROWS_AS(categorize_parallelism(0), Error);
}

TEST_CASE("category preimages partition the integers >= 1") {
    ParallelismCategory prev = categorize_parallelism(1);
    int transitions = 0;
    for (int d = 2; d <= 600; ++d) {
        auto cat = categorize_parallelism(d);
        if (cat != prev) {
            ++transitions;
            CHECK(static_cast<int>(cat) == static_cast<int>(prev) + 1);
            prev = cat;
        }
    }
    CHECK(transitions == 5);
}

TEST_CASE("physical expansion counts instances and channels") {
    QueryPlan plan;
    plan.id = "expand";
    plan.structure_tag = "linear";
    plan.operators.push_back(make_source("src"));
    auto f = make_filter("f", 0, FilterFn::Ge, Value{std::int64_t{0}}, 1.0);
    f.inbound.kind = PartitioningKind::Rebalance;
    f.parallelism = 3;
    plan.operators.push_back(f);
    plan.operators.push_back(make_sink("sink"));
    plan.edges = {{"src", "f"}, {"f", "sink"}};
    plan.streams["src"] = int_double_stream();

    auto phys = expand_to_physical(plan);
    CHECK(phys.instance_count() == 5);
    CHECK(phys.channel_count() == 6); // 1x3 + 3x1

    SUBCASE("identity expansion at parallelism 1") {
        auto lin = linear_plan();
        auto p = expand_to_physical(lin);
        CHECK(p.instance_count() == lin.operators.size());
        CHECK(p.channel_count() == lin.edges.size());
    }

    SUBCASE("forward pairing yields one channel per instance pair") {
        QueryPlan fw;
        fw.id = "fw";
        fw.structure_tag = "linear";
        auto src = make_source("src");
        src.parallelism = 2;
        fw.operators.push_back(src);
        auto ff = make_filter("f", 0, FilterFn::Ge, Value{std::int64_t{0}}, 1.0);
        ff.parallelism = 2;
        fw.operators.push_back(ff);
        auto sink = make_sink("sink");
        fw.operators.push_back(sink);
        fw.edges = {{"src", "f"}, {"f", "sink"}};
        fw.streams["src"] = int_double_stream();
        auto p = expand_to_physical(fw);
        std::size_t forward_channels = 0;
        for (const auto& c : p.channels)
            if (p.instances[c.to_instance].op_index == 1) ++forward_channels;
        CHECK(forward_channels == 2);
    }
}

TEST_CASE("expansion invariants over assorted degrees") {
    for (int pf : {1, 2, 5}) {
        for (int pa : {1, 3}) {
            auto plan = linear_plan();
            auto* f = plan.find_op("filter1");
            f->inbound.kind = PartitioningKind::Rebalance;
            f->parallelism = pf;
            plan.find_op("agg2")->parallelism = pa;
            auto phys = expand_to_physical(plan);
            std::size_t expected_instances = 1 + pf + pa + 1;
            CHECK(phys.instance_count() == expected_instances);
            std::size_t expected_channels = static_cast<std::size_t>(1 * pf) + pf * pa + pa * 1;
            CHECK(phys.channel_count() == expected_channels);
        }
    }
}

TEST_CASE("plans round-trip through the record format") {
    auto plan = two_way_join_plan();
    plan.notes.push_back("coerced forward to rebalance on edge filter2 -> join4");
    auto line = plan_to_line(plan);
    auto back = plan_from_line(line);
    CHECK(back.id == plan.id);
    CHECK(back.structure_tag == plan.structure_tag);
    CHECK(back.operators == plan.operators);
    CHECK(back.edges == plan.edges);
    CHECK(back.streams == plan.streams);
    CHECK(back.notes == plan.notes);
    CHECK(plan_to_line(back) == line);
}

TEST_CASE("unknown fields in plan records are rejected") {
    auto plan = linear_plan();
    auto j = plan_to_json(plan);
    j["surprise"] = 1;
    CHECK_THROWS_AS(plan_from_json(j), Error);

    auto j2 = plan_to_json(plan);
    j2["operators"][0]["mystery"] = true;
    CHECK_THROWS_AS(plan_from_json(j2), Error);
}

TEST_CASE("schema flow matches the documented operator contracts") {
    auto plan = two_way_join_plan();
    auto schemas = compute_schemas(plan);
    CHECK(schemas["join4"].width() == 4); // concatenation of both inputs
    CHECK(schemas["filter2"] == plan.streams["src0"].schema);

    auto lin = linear_plan();
    auto s2 = compute_schemas(lin);
    // keyed aggregate: key, value, window end
    CHECK(s2["agg2"].fields ==
          std::vector<DataType>{DataType::Integer, DataType::Double, DataType::Double});
}

TEST_CASE("filter evaluation handles all functions") {
    Tuple t;
    t.values = {Value{std::int64_t{5}}, Value{std::string("abcdef")}};
    CHECK(filter_matches(FilterSpec{0, FilterFn::Lt, Value{std::int64_t{6}}, 1}, t));
    CHECK_FALSE(filter_matches(FilterSpec{0, FilterFn::Gt, Value{std::int64_t{6}}, 1}, t));
    CHECK(filter_matches(FilterSpec{0, FilterFn::Le, Value{std::int64_t{5}}, 1}, t));
    CHECK(filter_matches(FilterSpec{0, FilterFn::Ge, Value{std::int64_t{5}}, 1}, t));
    CHECK(filter_matches(FilterSpec{0, FilterFn::Eq, Value{std::int64_t{5}}, 1}, t));
    CHECK(filter_matches(FilterSpec{0, FilterFn::Ne, Value{std::int64_t{7}}, 1}, t));
    CHECK(filter_matches(FilterSpec{1, FilterFn::StartsWith, Value{std::string("abc")}, 1}, t));
    CHECK(filter_matches(FilterSpec{1, FilterFn::EndsWith, Value{std::string("def")}, 1}, t));
    CHECK_FALSE(filter_matches(FilterSpec{1, FilterFn::StartsNotWith, Value{std::string("ab")}, 1}, t));
    CHECK(filter_matches(FilterSpec{1, FilterFn::EndsNotWith, Value{std::string("xyz")}, 1}, t));
    CHECK_THROWS_AS(filter_matches(FilterSpec{0, FilterFn::StartsWith, Value{std::string("a")}, 1}, t),
                    Error);
}

TEST_CASE("valid plans always expand") {
    auto plan = two_way_join_plan();
    for (int p : {1, 2, 8}) {
        plan.find_op("join4")->parallelism = p;
        auto* f2 = plan.find_op("filter2");
        auto* f3 = plan.find_op("filter3");
        f2->inbound.kind = PartitioningKind::Rebalance;
        f3->inbound.kind = PartitioningKind::Rebalance;
        f2->parallelism = p;
        f3->parallelism = p;
        REQUIRE(validate_plan(plan).ok());
        CHECK_NOTHROW(expand_to_physical(plan));
    }
}
