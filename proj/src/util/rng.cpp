#include "util/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace pdsp {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "invalid_argument";
        case ErrorCode::Io: return "io";
        case ErrorCode::Generation: return "generation";
        case ErrorCode::Execution: return "execution";
        case ErrorCode::Training: return "training";
        case ErrorCode::Internal: return "internal";
    }
    return "unknown";
}

ZipfSampler::ZipfSampler(std::size_t n, double skew) {
    if (n == 0) throw_invalid("ZipfSampler requires n > 0");
    cdf_.resize(n);
    double acc = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        acc += 1.0 / std::pow(static_cast<double>(r + 1), skew);
        cdf_[r] = acc;
    }
    for (auto& v : cdf_) v /= acc;
    cdf_.back() = 1.0;
}

std::shared_ptr<const ZipfSampler> zipf_sampler_cached(std::size_t n, double skew) {
    static std::mutex mu;
    static std::map<std::pair<std::size_t, double>, std::shared_ptr<const ZipfSampler>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& entry = cache[{n, skew}];
    if (!entry) entry = std::make_shared<const ZipfSampler>(n, skew);
    return entry;
}

std::size_t ZipfSampler::sample(Rng& rng) const {
    double u = rng.uniform01();
    auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) return cdf_.size() - 1;
    return static_cast<std::size_t>(it - cdf_.begin());
}

} // namespace pdsp
