// Exercises the public C surface end to end, the way an embedding client
// would: opaque handle, JSON options, error codes, library-owned strings.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"

#include "pdsp/pdsp.h"

namespace {

using nlohmann::json;

struct Workspace {
    std::string dir;
    explicit Workspace(const std::string& name) : dir("/tmp/pdsp_capi_" + name) {
        std::filesystem::remove_all(dir);
        std::filesystem::create_directories(dir);
    }
    ~Workspace() { std::filesystem::remove_all(dir); }
    std::string path(const std::string& name) const { return dir + "/" + name; }
};

// rates and windows small enough that desk runs complete in milliseconds
json desk_config() {
    json j;
    j["generator"] = {{"structures", {"linear"}},
                      {"count", 4},
                      {"seed", 11},
                      {"event_rates", {2000.0, 5000.0}},
                      {"window_durations_ms", {50, 100}},
                      {"window_lengths_tuples", {2, 3, 5}},
                      {"arrivals", {"poisson", "uniform"}},
                      {"selectivity_sample", 1000}};
    j["duration_s"] = 1.0;
    j["protocol_runs"] = 3;
    j["strategy"] = {{"strategy", "rule"}, {"degree_min", 1}, {"degree_max", 8}};
    j["results_dir"] = "";
    return j;
}

struct Owned {
    char* s = nullptr;
    ~Owned() { pdsp_string_free(s); }
};

} // namespace

TEST_CASE("version and status names") {
    CHECK(std::string(pdsp_version()) == "0.1.0");
    CHECK(std::string(pdsp_status_name(PDSP_OK)) == "ok");
    CHECK(std::string(pdsp_status_name(PDSP_ERR_IO)) == "io");
    CHECK(std::string(pdsp_status_name(PDSP_ERR_TRAINING)) == "training");
}

TEST_CASE("harness creation validates its configuration") {
    pdsp_harness* h = nullptr;
    CHECK(pdsp_harness_create(nullptr, &h) == PDSP_OK);
    REQUIRE(h != nullptr);

    Owned cfg;
    CHECK(pdsp_harness_config(h, &cfg.s) == PDSP_OK);
    auto parsed = json::parse(cfg.s);
    CHECK(parsed["cluster"] == "m510x10");
    CHECK(parsed["protocol_runs"] == 3);
    CHECK(parsed["duration_s"] == 180.0);
    CHECK(parsed["split"]["train"] == 0.8);
    pdsp_harness_destroy(h);

    pdsp_harness* bad = nullptr;
    CHECK(pdsp_harness_create("{\"no_such_key\": 1}", &bad) == PDSP_ERR_INVALID_ARGUMENT);
    CHECK(std::string(pdsp_last_error()).find("no_such_key") != std::string::npos);
    CHECK(pdsp_harness_create("{not json", &bad) == PDSP_ERR_INVALID_ARGUMENT);

    CHECK(pdsp_harness_create_from_file("/nonexistent/config.json", &bad) == PDSP_ERR_IO);
}

TEST_CASE("generate, validate, run, report, export through the C API") {
    Workspace ws("pipeline");
    pdsp_harness* h = nullptr;
    REQUIRE(pdsp_harness_create(desk_config().dump().c_str(), &h) == PDSP_OK);

    auto plans = ws.path("plans.jsonl");
    Owned gen_summary;
    REQUIRE(pdsp_generate(h, nullptr, plans.c_str(), &gen_summary.s) == PDSP_OK);
    auto gen = json::parse(gen_summary.s);
    CHECK(gen["plans"] == 4);
    CHECK(gen["per_structure"]["linear"] == 4);

    Owned validation;
    REQUIRE(pdsp_validate_plans(h, plans.c_str(), &validation.s) == PDSP_OK);
    for (const auto& entry : json::parse(validation.s)) CHECK(entry["ok"] == true);

    auto enumerated = ws.path("enumerated.jsonl");
    Owned enum_summary;
    REQUIRE(pdsp_enumerate(h, plans.c_str(), "{\"strategy\":{\"strategy\":\"minavgmax\"}}",
                           enumerated.c_str(), &enum_summary.s) == PDSP_OK);
    CHECK(json::parse(enum_summary.s)["plans"] == 12); // 3 per base

    auto corpus = ws.path("corpus.jsonl");
    Owned run_summary;
    REQUIRE(pdsp_run(h, plans.c_str(), nullptr, corpus.c_str(), &run_summary.s) == PDSP_OK);
    auto run = json::parse(run_summary.s);
    CHECK(run["records"] == 4); // rule strategy: one record per base
    CHECK(run["failures"].empty());

    Owned report;
    REQUIRE(pdsp_report(h, corpus.c_str(), nullptr, &report.s) == PDSP_OK);
    std::string report_csv(report.s);
    CHECK(report_csv.rfind("structure,category,cluster,n,p50_us", 0) == 0);

    Owned grouped;
    REQUIRE(pdsp_report(h, corpus.c_str(), "cluster", &grouped.s) == PDSP_OK);
    CHECK(std::string(grouped.s).find("*,*,m510x10") != std::string::npos);

    Owned exported;
    REQUIRE(pdsp_corpus_export(h, corpus.c_str(), &exported.s) == PDSP_OK);
    CHECK(std::string(exported.s).find("latency_us,throughput_tps") != std::string::npos);

    pdsp_harness_destroy(h);
}

TEST_CASE("error paths set codes and messages") {
    pdsp_harness* h = nullptr;
    REQUIRE(pdsp_harness_create(nullptr, &h) == PDSP_OK);

    Owned out;
    CHECK(pdsp_report(h, "/nonexistent/corpus.jsonl", nullptr, &out.s) == PDSP_ERR_IO);
    CHECK(std::string(pdsp_last_error()).find("corpus") != std::string::npos);

    CHECK(pdsp_generate(h, "{\"generator\":{\"structures\":[\"bogus\"]}}", "/tmp/x.jsonl", nullptr) ==
          PDSP_ERR_INVALID_ARGUMENT);
    CHECK(std::string(pdsp_last_error()).find("bogus") != std::string::npos);

    CHECK(pdsp_generate(nullptr, nullptr, "/tmp/x.jsonl", nullptr) == PDSP_ERR_INVALID_ARGUMENT);

    double q = 0;
    CHECK(pdsp_q_error(10, 10, &q) == PDSP_OK);
    CHECK(q == 1.0);
    CHECK(pdsp_q_error(2, 8, &q) == PDSP_OK);
    CHECK(q == 4.0);
    CHECK(pdsp_q_error(0, 1, &q) == PDSP_ERR_INVALID_ARGUMENT);

    const char* name = nullptr;
    CHECK(pdsp_parallelism_category(1, &name) == PDSP_OK);
    CHECK(std::string(name) == "XS");
    CHECK(pdsp_parallelism_category(128, &name) == PDSP_OK);
    CHECK(std::string(name) == "XXL");
    CHECK(pdsp_parallelism_category(0, &name) == PDSP_ERR_INVALID_ARGUMENT);

    pdsp_harness_destroy(h);
}

TEST_CASE("train and evaluate through the C API") {
    Workspace ws("train");
    auto cfg = desk_config();
    cfg["generator"]["count"] = 24;
    cfg["generator"]["structures"] = {"linear", "2-way-join"};
    pdsp_harness* h = nullptr;
    REQUIRE(pdsp_harness_create(cfg.dump().c_str(), &h) == PDSP_OK);

    auto plans = ws.path("plans.jsonl");
    auto corpus = ws.path("corpus.jsonl");
    REQUIRE(pdsp_generate(h, nullptr, plans.c_str(), nullptr) == PDSP_OK);
    Owned run_summary;
    REQUIRE(pdsp_run(h, plans.c_str(), nullptr, corpus.c_str(), &run_summary.s) == PDSP_OK);
    REQUIRE(json::parse(run_summary.s)["failures"].empty());

    auto model = ws.path("model.json");
    Owned train_summary;
    REQUIRE(pdsp_train(h, corpus.c_str(), "{\"train\":{\"model\":\"lr\"}}", model.c_str(),
                       &train_summary.s) == PDSP_OK);
    auto ts = json::parse(train_summary.s);
    CHECK(ts["model"] == "lr");
    CHECK(ts["train_records"].get<int>() >= 10);

    Owned eval_csv;
    REQUIRE(pdsp_evaluate(h, model.c_str(), corpus.c_str(), nullptr, 0, &eval_csv.s) == PDSP_OK);
    std::string csv(eval_csv.s);
    CHECK(csv.rfind("model,structure,n,q50,q95,qmax,train_seconds", 0) == 0);
    CHECK(csv.find("lr,all,") != std::string::npos);

    // feature-version / model-file mismatch is a clean error
    std::ofstream bad(ws.path("bad_model.json"));
    bad << "{\"format_version\": 1, \"kind\": \"lr\", \"feature_version\": 99}";
    bad.close();
    Owned bad_csv;
    CHECK(pdsp_evaluate(h, ws.path("bad_model.json").c_str(), corpus.c_str(), nullptr, 0,
                        &bad_csv.s) != PDSP_OK);

    pdsp_harness_destroy(h);
}
