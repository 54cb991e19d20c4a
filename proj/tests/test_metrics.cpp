#include "doctest.h"

#include "metrics/metrics.hpp"
#include "util/rng.hpp"

using namespace pdsp;

TEST_CASE("nearest-rank percentiles") {
    CHECK(summarize_latency({5}).p50 == 5);
    CHECK(summarize_latency({5}).mean == 5);

    auto s = summarize_latency({1, 2, 3, 4, 100});
    CHECK(s.p50 == 3); // ceil(0.5 * 5) = 3rd element
    CHECK(s.min == 1);
    CHECK(s.max == 100);
    CHECK(s.mean == doctest::Approx(22.0));

    CHECK(percentile_nearest_rank({9, 7, 8}, 0.5) == 8);
    CHECK_THROWS_AS(summarize_latency({}), Error);
}

TEST_CASE("per-run medians and their mean") {
    std::vector<std::vector<double>> runs = {{10, 10, 10}, {12, 12, 12}, {14, 14, 14}};
    auto s = summarize_latency_runs(runs);
    REQUIRE(s.run_medians.size() == 3);
    CHECK(s.run_medians[0] == 10);
    CHECK(s.run_medians[1] == 12);
    CHECK(s.run_medians[2] == 14);
    CHECK(s.mean_of_medians == doctest::Approx(12.0));
    CHECK(s.sample_count == 9);
}

TEST_CASE("q-error basics") {
    CHECK(q_error(10, 10).value == 1.0);
    CHECK(q_error(2, 8).value == 4.0);
    CHECK(q_error(8, 2).value == 4.0);
    CHECK_THROWS_AS(q_error(0, 1), Error);
    CHECK_THROWS_AS(q_error(-1, 1), Error);
    // prediction floor prevents division blowup
    CHECK(q_error(1.0, 0.0).value == doctest::Approx(1e6));
}

TEST_CASE("q-error symmetry and scale invariance over random pairs") {
    Rng rng(7);
    for (int i = 0; i < 1000; ++i) {
        double c = rng.uniform(0.001, 1e6);
        double chat = rng.uniform(0.001, 1e6);
        double a = rng.uniform(0.1, 100.0);
        CHECK(q_error(c, chat).value == doctest::Approx(q_error(chat, c).value));
        CHECK(q_error(a * c, a * chat).value == doctest::Approx(q_error(c, chat).value));
        CHECK(q_error(c, chat).value >= 1.0);
    }
}

TEST_CASE("percentile monotonicity over random sample sets") {
    Rng rng(11);
    for (int i = 0; i < 1000; ++i) {
        std::size_t n = 1 + rng.below(50);
        std::vector<double> samples;
        for (std::size_t k = 0; k < n; ++k) samples.push_back(rng.uniform(0, 1e5));
        auto s = summarize_latency(samples);
        CHECK(s.min <= s.p50);
        CHECK(s.p50 <= s.p95);
        CHECK(s.p95 <= s.p99);
        CHECK(s.p99 <= s.max);
        CHECK(s.sample_count == n);
    }
}

TEST_CASE("q-error report aggregates elementwise errors") {
    auto r = q_error_report({{2, 2}, {2, 4}, {2, 8}});
    CHECK(r.median == 2.0);
    CHECK(r.max == 4.0);

    auto perfect = q_error_report({{5, 5}, {6, 6}});
    CHECK(perfect.median == 1.0);
    CHECK(perfect.p95 == 1.0);
    CHECK(perfect.max == 1.0);

    auto single = q_error_report({{3, 6}});
    CHECK(single.median == 2.0);
    CHECK(single.p95 == 2.0);
    CHECK(single.max == 2.0);

    CHECK_THROWS_AS(q_error_report({}), Error);

    // report over identical pairs equals the q-error of one pair
    auto same = q_error_report({{4, 8}, {4, 8}, {4, 8}});
    CHECK(same.median == q_error(4, 8).value);
}

TEST_CASE("throughput is deliveries per second") {
    CHECK(throughput_tps(3000, 3e6) == doctest::Approx(1000.0));
    CHECK(throughput_tps(0, 1e6) == 0.0);
    CHECK_THROWS_AS(throughput_tps(1, 0), Error);
}

TEST_CASE("latency csv row matches the documented schema") {
    std::string header(kLatencyCsvHeader);
    CHECK(header == "plan_id,cluster,mode,runs,p50_us,p95_us,p99_us,mean_us,throughput_tps");
    auto s = summarize_latency({1, 2, 3});
    auto row = latency_csv_row("p1", "m510x10", "sim", 3, s, 42.5);
    CHECK(row.substr(0, 15) == "p1,m510x10,sim,");
}
