#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "util/error.hpp"

namespace pdsp {

struct LatencySummary {
    double p50 = 0, p95 = 0, p99 = 0;
    double mean = 0, min = 0, max = 0;
    std::size_t sample_count = 0;
    std::vector<double> run_medians;  // populated when per-run groups are given
    double mean_of_medians = 0;       // the three-run protocol statistic
};

// Nearest-rank percentile: element at index ceil(p * n), 1-based, of the
// sorted samples. No interpolation, so results are bit-exact across
// implementations.
double percentile_nearest_rank(std::vector<double> samples, double p);

LatencySummary summarize_latency(const std::vector<double>& samples);
LatencySummary summarize_latency_runs(const std::vector<std::vector<double>>& per_run_samples);

struct QError {
    double value = 1.0; // >= 1, equals 1 iff prediction == truth
};

// max(c/c', c'/c) with the prediction clamped to >= 1e-6 before dividing.
QError q_error(double truth, double prediction);

struct QErrorReport {
    double median = 1.0;
    double p95 = 1.0;
    double max = 1.0;
    std::size_t count = 0;
};

QErrorReport q_error_report(const std::vector<std::pair<double, double>>& truth_prediction_pairs);

double throughput_tps(std::size_t sink_deliveries, double duration_us);

// CSV row in the summary schema:
// plan_id,cluster,mode,runs,p50_us,p95_us,p99_us,mean_us,throughput_tps
extern const char* kLatencyCsvHeader;
std::string latency_csv_row(const std::string& plan_id, const std::string& cluster,
                            const std::string& mode, std::size_t runs, const LatencySummary& summary,
                            double throughput);

} // namespace pdsp
