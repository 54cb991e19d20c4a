#pragma once

#include <vector>

#include "dataflow/tuple.hpp"
#include "dataflow/types.hpp"

namespace pdsp {

// Value domains are harness constants: integers uniform over [0, 10^6)
// (field 0 instead draws from [0, key_cardinality) when integer), doubles
// uniform over [0, 1e6), strings from a seeded pool of string_pool distinct
// values. With arrival == Zipf, timestamps are uniform-spaced and the value
// index of every field is zipf(skew)-distributed over its domain.
inline constexpr std::int64_t kIntDomain = 1000000;
inline constexpr double kDoubleDomain = 1e6;
inline constexpr std::size_t kReplayPeriod = 10000; // tuples, when replay is set

class StreamGenerator {
public:
    StreamGenerator(const StreamSpec& spec, std::uint64_t seed);

    // Next tuple in the sequence. Timestamps are microseconds from stream start.
    Tuple next();

    const StreamSpec& spec() const { return spec_; }

    // The string pool backing string fields of this stream (useful for
    // proposing filter literals that can actually match).
    const std::vector<std::string>& string_pool() const { return pool_; }

private:
    Value draw_value(std::size_t field);

    StreamSpec spec_;
    Rng value_rng_;
    Rng arrival_rng_;
    std::vector<std::string> pool_;
    std::vector<std::shared_ptr<const ZipfSampler>> zipf_; // per field, Zipf arrival kind only
    double next_ts_ = 0.0;
    std::size_t index_ = 0;
    std::vector<std::vector<Value>> replay_buffer_;
};

// First `count` tuples of the stream.
std::vector<Tuple> generate_stream(const StreamSpec& spec, std::uint64_t seed, std::size_t count);

// All tuples with event timestamp strictly below duration_us.
std::vector<Tuple> generate_stream_for(const StreamSpec& spec, std::uint64_t seed, double duration_us);

} // namespace pdsp
