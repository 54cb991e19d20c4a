#include "workload/stream.hpp"

namespace pdsp {

namespace {

std::string pool_string(Rng& rng) {
    static const char alphabet[] = "abcdefghijklmnopqrstuvwxyz";
    std::string s(8, 'a');
    for (auto& c : s) c = alphabet[rng.below(26)];
    return s;
}

} // namespace

StreamGenerator::StreamGenerator(const StreamSpec& spec, std::uint64_t seed)
    : spec_(spec), value_rng_(mix_seed(seed, 1)), arrival_rng_(mix_seed(seed, 2)) {
    if (spec_.event_rate <= 0) throw_invalid("stream event rate must be positive");
    if (spec_.schema.width() == 0) throw_invalid("stream schema must not be empty");
    if (spec_.string_pool < 1) throw_invalid("string pool must hold at least one value");
    if (spec_.key_cardinality < 1) throw_invalid("key cardinality must be at least 1");

    Rng pool_rng(mix_seed(seed, 3));
    pool_.reserve(static_cast<std::size_t>(spec_.string_pool));
    for (int i = 0; i < spec_.string_pool; ++i) pool_.push_back(pool_string(pool_rng));

    if (spec_.arrival == ArrivalKind::Zipf) {
        // Skew applies to key-like fields (integers and strings); measurement
        // doubles keep their uniform domain.
        for (std::size_t f = 0; f < spec_.schema.width(); ++f) {
            std::size_t domain = 1;
            switch (spec_.schema.fields[f]) {
                case DataType::Integer:
                    domain = f == 0 ? static_cast<std::size_t>(spec_.key_cardinality)
                                    : static_cast<std::size_t>(kIntDomain);
                    break;
                case DataType::Double:
                    break;
                case DataType::String:
                    domain = pool_.size();
                    break;
            }
            zipf_.push_back(zipf_sampler_cached(domain, spec_.zipf_skew));
        }
    }
}

Value StreamGenerator::draw_value(std::size_t field) {
    DataType t = spec_.schema.fields[field];
    if (spec_.arrival == ArrivalKind::Zipf && t != DataType::Double) {
        std::size_t rank = zipf_[field]->sample(value_rng_);
        switch (t) {
            case DataType::Integer: return Value{static_cast<std::int64_t>(rank)};
            case DataType::String: return Value{pool_[rank]};
            default: break;
        }
    }
    switch (t) {
        case DataType::Integer: {
            std::int64_t domain = field == 0 ? spec_.key_cardinality : kIntDomain;
            return Value{value_rng_.uniform_int(0, domain)};
        }
        case DataType::Double:
            return Value{value_rng_.uniform(0.0, kDoubleDomain)};
        case DataType::String:
            return Value{pool_[value_rng_.below(pool_.size())]};
    }
    throw_invalid("unhandled data type");
}

Tuple StreamGenerator::next() {
    Tuple t;
    if (spec_.replay) {
        // Looped finite source: the value sequence repeats with a fixed period
        // while timestamps keep advancing.
        std::size_t pos = index_ % kReplayPeriod;
        if (pos < replay_buffer_.size()) {
            t.values = replay_buffer_[pos];
        } else {
            t.values.reserve(spec_.schema.width());
            for (std::size_t f = 0; f < spec_.schema.width(); ++f) t.values.push_back(draw_value(f));
            replay_buffer_.push_back(t.values);
        }
    } else {
        t.values.reserve(spec_.schema.width());
        for (std::size_t f = 0; f < spec_.schema.width(); ++f) t.values.push_back(draw_value(f));
    }

    const double interval_us = 1e6 / spec_.event_rate;
    switch (spec_.arrival) {
        case ArrivalKind::Uniform:
        case ArrivalKind::Zipf:
            t.event_ts = static_cast<double>(index_) * interval_us;
            break;
        case ArrivalKind::Poisson:
            t.event_ts = next_ts_;
            next_ts_ += arrival_rng_.exponential(interval_us);
            break;
    }
    t.production_ts = t.event_ts;
    ++index_;
    return t;
}

std::vector<Tuple> generate_stream(const StreamSpec& spec, std::uint64_t seed, std::size_t count) {
    if (count == 0) throw_invalid("tuple count must be positive");
    StreamGenerator gen(spec, seed);
    std::vector<Tuple> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(gen.next());
    return out;
}

std::vector<Tuple> generate_stream_for(const StreamSpec& spec, std::uint64_t seed, double duration_us) {
    if (duration_us <= 0) throw_invalid("stream duration must be positive");
    StreamGenerator gen(spec, seed);
    std::vector<Tuple> out;
    for (;;) {
        Tuple t = gen.next();
        if (t.event_ts >= duration_us) break;
        out.push_back(std::move(t));
    }
    return out;
}

} // namespace pdsp
