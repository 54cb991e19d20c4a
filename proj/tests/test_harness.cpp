#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "harness/stages.hpp"
#include "helpers.hpp"

using namespace pdsp;
using namespace pdsp::testing;

namespace {

RunRecord record_with(QueryPlan plan, const std::string& cluster_spec, double latency) {
    RunRecord r;
    r.plan = std::move(plan);
    r.cluster = resolve_cluster(cluster_spec);
    r.cluster_name = r.cluster.name;
    r.cluster_digest = r.cluster.digest();
    r.strategy = "rule";
    r.mode = "sim";
    r.latency_label_us = latency;
    r.throughput_label_tps = 10.0;
    r.seed = 1;
    return r;
}

} // namespace

TEST_CASE("harness config round-trips losslessly") {
    HarnessConfig config;
    config.cluster = "c6525_25gx5+c6320x5";
    config.mode = ExecMode::Threads;
    config.duration_s = 2.5;
    config.generator.structures = {"linear", "AD"};
    config.strategy.strategy.kind = StrategyKind::Exhaustive;
    config.strategy.strategy.per_op_ranges["f"] = {2, 5};
    config.strategy.strategy.assignments["f"] = 3;
    config.split.key = SplitKey::ByPlanStructure;
    config.split.holdout_structures = {"4-way-join"};
    config.train.kind = ModelKind::GNN;
    config.cost.udo_cost["road_match"] = 7.5;
    config.trace = true;

    auto j = config.to_json();
    auto back = HarnessConfig::from_json(j);
    CHECK(back.to_json() == j);

    // file round trip
    std::string path = "/tmp/pdsp_config_roundtrip.json";
    std::ofstream(path) << j.dump(2);
    auto from_file = HarnessConfig::from_file(path);
    CHECK(from_file.to_json() == j);
    std::remove(path.c_str());

    CHECK_THROWS_AS(HarnessConfig::from_json({{"mystery", 1}}), Error);
}

TEST_CASE("stage overrides merge one level deep") {
    HarnessConfig base;
    auto merged = apply_overrides(base, {{"generator", {{"seed", 42}, {"count", 7}}},
                                         {"duration_s", 0.5}});
    CHECK(merged.generator.seed == 42);
    CHECK(merged.generator.count == 7);
    CHECK(merged.duration_s == 0.5);
    // untouched keys keep their defaults
    CHECK(merged.generator.structures == base.generator.structures);
    CHECK_THROWS_AS(apply_overrides(base, {{"no_such", 1}}), Error);
}

TEST_CASE("report groups by structure, category, and cluster") {
    auto tmp = std::filesystem::path("/tmp/pdsp_report_test.jsonl");
    std::filesystem::remove(tmp);
    {
        CorpusStore store(tmp.string());
        auto xs_plan = linear_plan(); // max parallelism 1 -> XS
        auto s_plan = linear_plan();
        s_plan.find_op("agg2")->parallelism = 8; // -> S
        store.append(record_with(xs_plan, "m510x10", 100));
        store.append(record_with(xs_plan, "m510x10", 200));
        store.append(record_with(s_plan, "m510x10", 300));
        store.append(record_with(xs_plan, "c6320x10", 400));
    }

    HarnessConfig config;
    SUBCASE("XS and S records of one structure make a 2-row table per cluster") {
        auto csv = stage_report(config, tmp.string(), {"structure", "category"});
        std::size_t rows = static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) - 1;
        CHECK(rows == 2);
        CHECK(csv.find("linear,XS,*") != std::string::npos);
        CHECK(csv.find("linear,S,*") != std::string::npos);
    }
    SUBCASE("group-by cluster yields per-cluster rows") {
        auto csv = stage_report(config, tmp.string(), {"cluster"});
        CHECK(csv.find("*,*,m510x10") != std::string::npos);
        CHECK(csv.find("*,*,c6320x10") != std::string::npos);
    }
    SUBCASE("header is the documented schema") {
        auto csv = stage_report(config, tmp.string(), {});
        CHECK(csv.rfind("structure,category,cluster,n,p50_us", 0) == 0);
    }
    SUBCASE("unknown group key is rejected") {
        CHECK_THROWS_AS(stage_report(config, tmp.string(), {"color"}), Error);
    }
    std::filesystem::remove(tmp);
}

TEST_CASE("pipeline failures name the failing stage") {
    HarnessConfig config;
    config.cluster = "m510x10";
    config.generator.count = 2;
    config.generator.structures = {"linear"};
    config.generator.selectivity_sample = 200;
    config.cluster = "doesnotexistx3";
    try {
        stage_pipeline(config, "/tmp/pdsp_pipeline_fail_test");
        FAIL("expected a stage failure");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("stage 'run'") != std::string::npos);
    }
    std::filesystem::remove_all("/tmp/pdsp_pipeline_fail_test");
}
