#include "metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace pdsp {

const char* kLatencyCsvHeader = "plan_id,cluster,mode,runs,p50_us,p95_us,p99_us,mean_us,throughput_tps";

double percentile_nearest_rank(std::vector<double> samples, double p) {
    if (samples.empty()) throw_invalid("percentile of empty sample set");
    if (p <= 0.0 || p > 1.0) throw_invalid("percentile fraction must be in (0, 1]");
    std::sort(samples.begin(), samples.end());
    auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(samples.size())));
    if (rank < 1) rank = 1;
    return samples[rank - 1];
}

LatencySummary summarize_latency(const std::vector<double>& samples) {
    if (samples.empty()) throw_invalid("summarize_latency requires at least one sample");
    LatencySummary s;
    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    auto rank = [&](double p) {
        auto r = static_cast<std::size_t>(std::ceil(p * static_cast<double>(sorted.size())));
        return sorted[std::max<std::size_t>(r, 1) - 1];
    };
    s.p50 = rank(0.5);
    s.p95 = rank(0.95);
    s.p99 = rank(0.99);
    s.min = sorted.front();
    s.max = sorted.back();
    s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(sorted.size());
    s.sample_count = sorted.size();
    s.run_medians = {s.p50};
    s.mean_of_medians = s.p50;
    return s;
}

LatencySummary summarize_latency_runs(const std::vector<std::vector<double>>& per_run_samples) {
    if (per_run_samples.empty()) throw_invalid("summarize_latency requires at least one run");
    std::vector<double> pooled;
    std::vector<double> medians;
    for (const auto& run : per_run_samples) {
        if (run.empty()) throw_invalid("summarize_latency: empty run sample set");
        pooled.insert(pooled.end(), run.begin(), run.end());
        medians.push_back(percentile_nearest_rank(run, 0.5));
    }
    LatencySummary s = summarize_latency(pooled);
    s.run_medians = medians;
    s.mean_of_medians =
        std::accumulate(medians.begin(), medians.end(), 0.0) / static_cast<double>(medians.size());
    return s;
}

QError q_error(double truth, double prediction) {
    if (truth <= 0.0) throw_invalid("q-error requires positive truth");
    constexpr double kFloor = 1e-6;
    double p = std::max(prediction, kFloor);
    return QError{std::max(truth / p, p / truth)};
}

QErrorReport q_error_report(const std::vector<std::pair<double, double>>& pairs) {
    if (pairs.empty()) throw_invalid("q_error_report requires at least one pair");
    std::vector<double> qs;
    qs.reserve(pairs.size());
    for (const auto& [c, chat] : pairs) qs.push_back(q_error(c, chat).value);
    QErrorReport r;
    r.median = percentile_nearest_rank(qs, 0.5);
    r.p95 = percentile_nearest_rank(qs, 0.95);
    r.max = *std::max_element(qs.begin(), qs.end());
    r.count = qs.size();
    return r;
}

double throughput_tps(std::size_t sink_deliveries, double duration_us) {
    if (duration_us <= 0.0) throw_invalid("throughput requires positive duration");
    return static_cast<double>(sink_deliveries) / (duration_us / 1e6);
}

std::string latency_csv_row(const std::string& plan_id, const std::string& cluster,
                            const std::string& mode, std::size_t runs, const LatencySummary& summary,
                            double throughput) {
    std::ostringstream os;
    os << plan_id << ',' << cluster << ',' << mode << ',' << runs << ',' << summary.p50 << ','
       << summary.p95 << ',' << summary.p99 << ',' << summary.mean << ',' << throughput;
    return os.str();
}

} // namespace pdsp
