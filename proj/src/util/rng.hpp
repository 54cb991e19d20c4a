#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "util/error.hpp"

namespace pdsp {

// splitmix64; used to derive independent sub-seeds from one master seed so
// that adding a consumer never shifts the draws of another.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// mt19937_64 with hand-rolled distributions. std:: distributions are not
// pinned across standard libraries, and corpora must be reproducible from
// the seed alone.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Unbiased integer in [0, n) via rejection.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw_invalid("Rng::below requires n > 0");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi_exclusive) {
        if (lo >= hi_exclusive) throw_invalid("Rng::uniform_int empty range");
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi_exclusive - lo)));
    }

    // 53-bit uniform in [0, 1).
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    double exponential(double mean) {
        double u;
        do {
            u = uniform01();
        } while (u <= 0.0);
        return -mean * std::log(u);
    }

    bool chance(double p) { return uniform01() < p; }

    template <class T>
    const T& pick(const std::vector<T>& items) {
        if (items.empty()) throw_invalid("Rng::pick on empty list");
        return items[below(items.size())];
    }

    template <class T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = below(i);
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

// Inverse-CDF Zipf sampler over ranks [0, n); rank 0 is the most frequent.
class ZipfSampler {
public:
    ZipfSampler(std::size_t n, double skew);

    std::size_t sample(Rng& rng) const;
    std::size_t size() const { return cdf_.size(); }

private:
    std::vector<double> cdf_;
};

// Table construction is O(n); selectivity estimation instantiates many
// generators over the same domains, so share the tables process-wide.
std::shared_ptr<const ZipfSampler> zipf_sampler_cached(std::size_t n, double skew);

inline std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t h = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace pdsp
