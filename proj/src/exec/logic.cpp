#include "exec/logic.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

namespace pdsp {

double bfprt_select(std::vector<double> values, std::size_t index) {
    if (values.empty() || index >= values.size()) throw_invalid("bfprt_select: bad rank");

    // Median-of-medians pivot selection, then three-way partition.
    struct Impl {
        static double select(std::vector<double>& v, std::size_t k) {
            while (true) {
                if (v.size() <= 10) {
                    std::sort(v.begin(), v.end());
                    return v[k];
                }
                std::vector<double> medians;
                medians.reserve(v.size() / 5 + 1);
                for (std::size_t i = 0; i < v.size(); i += 5) {
                    std::size_t len = std::min<std::size_t>(5, v.size() - i);
                    std::sort(v.begin() + static_cast<std::ptrdiff_t>(i),
                              v.begin() + static_cast<std::ptrdiff_t>(i + len));
                    medians.push_back(v[i + len / 2]);
                }
                double pivot = select(medians, medians.size() / 2);

                std::vector<double> lo, eq, hi;
                for (double x : v) {
                    if (x < pivot)
                        lo.push_back(x);
                    else if (x > pivot)
                        hi.push_back(x);
                    else
                        eq.push_back(x);
                }
                if (k < lo.size()) {
                    v.swap(lo);
                } else if (k < lo.size() + eq.size()) {
                    return pivot;
                } else {
                    k -= lo.size() + eq.size();
                    v.swap(hi);
                }
            }
        }
    };
    return Impl::select(values, index);
}

namespace {

struct ValueLess {
    bool operator()(const Value& a, const Value& b) const { return compare_values(a, b) < 0; }
};

class FilterLogic final : public InstanceLogic {
public:
    explicit FilterLogic(FilterSpec spec) : spec_(std::move(spec)) {}
    void on_tuple(const Tuple& t, int, std::vector<Tuple>& out, EmitStats&) override {
        if (filter_matches(spec_, t)) out.push_back(t);
    }
    void on_close(std::vector<Tuple>&, EmitStats&) override {}

private:
    FilterSpec spec_;
};

class PassLogic final : public InstanceLogic {
public:
    void on_tuple(const Tuple& t, int, std::vector<Tuple>& out, EmitStats&) override { out.push_back(t); }
    void on_close(std::vector<Tuple>&, EmitStats&) override {}
};

// Splits the first string field on spaces, emitting one tuple per token.
// Tuples without a string field pass through unchanged.
class FlatMapLogic final : public InstanceLogic {
public:
    void on_tuple(const Tuple& t, int, std::vector<Tuple>& out, EmitStats&) override {
        std::size_t field = t.values.size();
        for (std::size_t i = 0; i < t.values.size(); ++i)
            if (std::holds_alternative<std::string>(t.values[i])) {
                field = i;
                break;
            }
        if (field == t.values.size()) {
            out.push_back(t);
            return;
        }
        const auto& text = std::get<std::string>(t.values[field]);
        std::size_t pos = 0;
        bool emitted = false;
        while (pos <= text.size()) {
            auto space = text.find(' ', pos);
            std::string token = space == std::string::npos ? text.substr(pos)
                                                           : text.substr(pos, space - pos);
            if (!token.empty()) {
                Tuple copy = t;
                copy.values[field] = token;
                out.push_back(std::move(copy));
                emitted = true;
            }
            if (space == std::string::npos) break;
            pos = space + 1;
        }
        if (!emitted) out.push_back(t);
    }
    void on_close(std::vector<Tuple>&, EmitStats&) override {}
};

struct AggAccum {
    double sum = 0;
    double min = 0;
    double max = 0;
    std::size_t count = 0;
    double min_production = 0;

    void add(double v, double production_ts) {
        if (count == 0) {
            min = max = v;
            min_production = production_ts;
        } else {
            min = std::min(min, v);
            max = std::max(max, v);
            min_production = std::min(min_production, production_ts);
        }
        sum += v;
        ++count;
    }

    double result(AggFn fn) const {
        switch (fn) {
            case AggFn::Min: return min;
            case AggFn::Max: return max;
            case AggFn::Sum: return sum;
            case AggFn::Avg:
            case AggFn::Mean:
                return count ? sum / static_cast<double>(count) : 0.0;
        }
        return 0.0;
    }
};

class AggregateLogic final : public InstanceLogic {
public:
    AggregateLogic(AggSpec spec, double duration_us) : spec_(std::move(spec)), duration_us_(duration_us) {}

    void on_tuple(const Tuple& t, int, std::vector<Tuple>& out, EmitStats& stats) override {
        Value key = spec_.key_field ? t.values[*spec_.key_field] : Value{std::int64_t{0}};
        double v = contribution(t);

        if (spec_.window.policy == WindowPolicy::Count) {
            on_count_tuple(key, v, t, out, stats);
        } else {
            fire_due(t.event_ts, out, stats);
            insert_time_tuple(key, v, t);
        }
    }

    void on_close(std::vector<Tuple>& out, EmitStats& stats) override {
        if (spec_.window.policy == WindowPolicy::Time) fire_due(duration_us_, out, stats);
        // partial count windows never fire
    }

private:
    double contribution(const Tuple& t) const {
        if (!spec_.value_field) return 1.0; // count-style aggregation
        return value_as_double(t.values[*spec_.value_field]);
    }

    Tuple make_output(const Value& key, const AggAccum& acc, double window_end) const {
        Tuple out;
        if (spec_.key_field) out.values.push_back(key);
        out.values.push_back(Value{acc.result(spec_.fn)});
        out.values.push_back(Value{window_end});
        out.event_ts = window_end;
        out.production_ts = acc.min_production;
        return out;
    }

    // --- count windows: cut the per-key sequence in merge order ---

    struct CountState {
        AggAccum tumbling;
        std::deque<std::pair<double, double>> ring; // (value, production_ts), sliding only
        std::size_t seen = 0;
    };

    void on_count_tuple(const Value& key, double v, const Tuple& t, std::vector<Tuple>& out,
                        EmitStats& stats) {
        auto& st = count_state_[key];
        const auto len = static_cast<std::size_t>(spec_.window.length);
        if (spec_.window.kind == WindowKind::Tumbling) {
            st.tumbling.add(v, t.production_ts);
            if (st.tumbling.count == len) {
                out.push_back(make_output(key, st.tumbling, t.event_ts));
                stats.window_fires++;
                st.tumbling = AggAccum{};
            }
        } else {
            const auto slide = static_cast<std::size_t>(spec_.window.slide_or_length());
            st.ring.emplace_back(v, t.production_ts);
            if (st.ring.size() > len) st.ring.pop_front();
            st.seen++;
            if (st.seen >= len && (st.seen - len) % slide == 0) {
                AggAccum acc;
                for (const auto& [val, prod] : st.ring) acc.add(val, prod);
                out.push_back(make_output(key, acc, t.event_ts));
                stats.window_fires++;
            }
        }
    }

    // --- time windows: event-time buckets, fired in (end, key) order ---

    struct WindowId {
        double start;
        Value key;
        bool operator<(const WindowId& other) const {
            if (start != other.start) return start < other.start;
            return compare_values(key, other.key) < 0;
        }
    };

    void insert_time_tuple(const Value& key, double v, const Tuple& t) {
        const double len = spec_.window.length_us();
        if (spec_.window.kind == WindowKind::Tumbling) {
            double start = std::floor(t.event_ts / len) * len;
            buckets_[WindowId{start, key}].add(v, t.production_ts);
        } else {
            const double slide = spec_.window.slide_us();
            auto m_hi = static_cast<std::int64_t>(std::floor(t.event_ts / slide));
            auto m_lo = static_cast<std::int64_t>(std::floor((t.event_ts - len) / slide)) + 1;
            m_lo = std::max<std::int64_t>(m_lo, 0);
            for (std::int64_t m = m_lo; m <= m_hi; ++m)
                buckets_[WindowId{static_cast<double>(m) * slide, key}].add(v, t.production_ts);
        }
    }

    // A window [start, end) is complete once the merged event time passes its
    // end. All windows share one length, so map order (start, key) equals
    // (end, key) order and firing walks the map front deterministically.
    void fire_due(double now_ts, std::vector<Tuple>& out, EmitStats& stats) {
        const double len = spec_.window.length_us();
        for (auto it = buckets_.begin(); it != buckets_.end();) {
            double end = it->first.start + len;
            if (end > now_ts) break;
            out.push_back(make_output(it->first.key, it->second, end));
            stats.window_fires++;
            it = buckets_.erase(it);
        }
    }

    AggSpec spec_;
    double duration_us_;
    std::map<Value, CountState, ValueLess> count_state_;
    std::map<WindowId, AggAccum> buckets_;
};

// Symmetric hash join over time windows; emits eagerly at probe time, once
// per shared window, so outputs stay ordered by the merged event time.
class JoinLogic final : public InstanceLogic {
public:
    explicit JoinLogic(JoinSpec spec) : spec_(std::move(spec)) {}

    void on_tuple(const Tuple& t, int side, std::vector<Tuple>& out, EmitStats& stats) override {
        const Value& key = t.values[side == 0 ? spec_.left_key : spec_.right_key];
        const double len = spec_.window.length_us();

        std::vector<std::int64_t> windows;
        if (spec_.window.kind == WindowKind::Tumbling) {
            windows.push_back(static_cast<std::int64_t>(std::floor(t.event_ts / len)));
        } else {
            const double slide = spec_.window.slide_us();
            auto m_hi = static_cast<std::int64_t>(std::floor(t.event_ts / slide));
            auto m_lo = static_cast<std::int64_t>(std::floor((t.event_ts - len) / slide)) + 1;
            for (std::int64_t m = std::max<std::int64_t>(m_lo, 0); m <= m_hi; ++m) windows.push_back(m);
        }

        evict(t.event_ts);

        for (std::int64_t w : windows) {
            auto& bucket = state_[w][key];
            auto& mine = side == 0 ? bucket.left : bucket.right;
            auto& other = side == 0 ? bucket.right : bucket.left;
            for (const auto& partner : other) {
                out.push_back(concat(side == 0 ? t : partner, side == 0 ? partner : t, t.event_ts));
                stats.join_matches++;
            }
            mine.push_back(t);
        }
    }

    void on_close(std::vector<Tuple>&, EmitStats&) override {}

private:
    struct Bucket {
        std::vector<Tuple> left;
        std::vector<Tuple> right;
    };

    static Tuple concat(const Tuple& l, const Tuple& r, double probe_ts) {
        Tuple out;
        out.values = l.values;
        out.values.insert(out.values.end(), r.values.begin(), r.values.end());
        out.event_ts = probe_ts;
        out.production_ts = std::min(l.production_ts, r.production_ts);
        return out;
    }

    void evict(double now_ts) {
        // merged input order makes event time monotone, so windows that can no
        // longer contain future tuples are dead
        const double len = spec_.window.length_us();
        const double slide = spec_.window.kind == WindowKind::Tumbling ? len : spec_.window.slide_us();
        auto live_lo = static_cast<std::int64_t>(std::floor((now_ts - len) / slide));
        for (auto it = state_.begin(); it != state_.end() && it->first < live_lo;)
            it = state_.erase(it);
    }

    JoinSpec spec_;
    std::map<std::int64_t, std::map<Value, Bucket, ValueLess>> state_;
};

double udo_param(const UdoSpec& spec, const std::string& name, double fallback) {
    auto it = spec.params.find(name);
    return it == spec.params.end() ? fallback : it->second;
}

// Keyword-table sentiment stand-in: bigram hit counting over the text field.
class SentimentLogic final : public InstanceLogic {
public:
    explicit SentimentLogic(const UdoSpec& spec)
        : field_(static_cast<std::size_t>(udo_param(spec, "field", 0))) {}

    void on_tuple(const Tuple& t, int, std::vector<Tuple>& out, EmitStats&) override {
        const auto& text = std::get<std::string>(t.values[field_]);
        static const std::vector<std::pair<std::string, double>> table = {
            {"ab", 1.0}, {"cd", 1.0}, {"ef", 1.0}, {"gh", -1.0}, {"ij", -1.0}, {"kl", -1.0},
        };
        double score = 0;
        for (const auto& [word, weight] : table) {
            for (std::size_t pos = text.find(word); pos != std::string::npos;
                 pos = text.find(word, pos + 1))
                score += weight;
        }
        Tuple copy = t;
        copy.values.push_back(Value{score});
        out.push_back(std::move(copy));
    }
    void on_close(std::vector<Tuple>&, EmitStats&) override {}

private:
    std::size_t field_;
};

class GeoBucketLogic final : public InstanceLogic {
public:
    explicit GeoBucketLogic(const UdoSpec& spec)
        : field_(static_cast<std::size_t>(udo_param(spec, "field", 0))),
          buckets_(static_cast<std::int64_t>(udo_param(spec, "buckets", 256))) {}

    void on_tuple(const Tuple& t, int, std::vector<Tuple>& out, EmitStats&) override {
        std::int64_t ip = std::get<std::int64_t>(t.values[field_]);
        Tuple copy = t;
        copy.values.push_back(Value{((ip % buckets_) + buckets_) % buckets_});
        out.push_back(std::move(copy));
    }
    void on_close(std::vector<Tuple>&, EmitStats&) override {}

private:
    std::size_t field_;
    std::int64_t buckets_;
};

// Exact sliding-buffer median per key; a tuple is flagged when its value
// exceeds threshold x median.
class MedianOutlierLogic final : public InstanceLogic {
public:
    explicit MedianOutlierLogic(const UdoSpec& spec)
        : value_field_(static_cast<std::size_t>(udo_param(spec, "value_field", 1))),
          window_(static_cast<std::size_t>(udo_param(spec, "window", 50))),
          threshold_(udo_param(spec, "threshold", 1.5)) {}

    void on_tuple(const Tuple& t, int, std::vector<Tuple>& out, EmitStats&) override {
        const Value& key = t.values[0];
        double v = value_as_double(t.values[value_field_]);
        auto& buf = buffers_[key];
        buf.push_back(v);
        if (buf.size() > window_) buf.pop_front();
        std::vector<double> copy(buf.begin(), buf.end());
        double median = bfprt_select(std::move(copy), buf.size() / 2);
        Tuple result = t;
        result.values.push_back(Value{median});
        result.values.push_back(Value{std::int64_t{v > threshold_ * median ? 1 : 0}});
        out.push_back(std::move(result));
    }
    void on_close(std::vector<Tuple>&, EmitStats&) override {}

private:
    std::size_t value_field_;
    std::size_t window_;
    double threshold_;
    std::map<Value, std::deque<double>, ValueLess> buffers_;
};

class RoadMatchLogic final : public InstanceLogic {
public:
    explicit RoadMatchLogic(const UdoSpec& spec)
        : x_field_(static_cast<std::size_t>(udo_param(spec, "x_field", 1))),
          y_field_(static_cast<std::size_t>(udo_param(spec, "y_field", 2))),
          grid_(udo_param(spec, "grid", 10000.0)) {}

    void on_tuple(const Tuple& t, int, std::vector<Tuple>& out, EmitStats&) override {
        auto ix = static_cast<std::int64_t>(std::floor(value_as_double(t.values[x_field_]) / grid_));
        auto iy = static_cast<std::int64_t>(std::floor(value_as_double(t.values[y_field_]) / grid_));
        Tuple copy = t;
        copy.values.push_back(Value{ix * 1000 + iy});
        out.push_back(std::move(copy));
    }
    void on_close(std::vector<Tuple>&, EmitStats&) override {}

private:
    std::size_t x_field_;
    std::size_t y_field_;
    double grid_;
};

class TopicThresholdLogic final : public InstanceLogic {
public:
    explicit TopicThresholdLogic(const UdoSpec& spec)
        : field_(static_cast<std::size_t>(udo_param(spec, "field", 1))),
          threshold_(udo_param(spec, "threshold", 2.0)) {}

    void on_tuple(const Tuple& t, int, std::vector<Tuple>& out, EmitStats&) override {
        if (value_as_double(t.values[field_]) >= threshold_) out.push_back(t);
    }
    void on_close(std::vector<Tuple>&, EmitStats&) override {}

private:
    std::size_t field_;
    double threshold_;
};

// Per-key exponential moving average of numerator/denominator.
class RollingCtrLogic final : public InstanceLogic {
public:
    explicit RollingCtrLogic(const UdoSpec& spec)
        : key_field_(static_cast<std::size_t>(udo_param(spec, "key_field", 0))),
          num_field_(static_cast<std::size_t>(udo_param(spec, "num_field", 1))),
          den_field_(static_cast<std::size_t>(udo_param(spec, "den_field", 4))),
          alpha_(udo_param(spec, "alpha", 0.5)) {}

    void on_tuple(const Tuple& t, int, std::vector<Tuple>& out, EmitStats&) override {
        double num = value_as_double(t.values[num_field_]);
        double den = value_as_double(t.values[den_field_]);
        double ratio = den != 0.0 ? num / den : 0.0;
        const Value& key = t.values[key_field_];
        auto it = ema_.find(key);
        double ema = it == ema_.end() ? ratio : alpha_ * ratio + (1.0 - alpha_) * it->second;
        ema_[key] = ema;
        Tuple copy = t;
        copy.values.push_back(Value{ema});
        out.push_back(std::move(copy));
    }
    void on_close(std::vector<Tuple>&, EmitStats&) override {}

private:
    std::size_t key_field_;
    std::size_t num_field_;
    std::size_t den_field_;
    double alpha_;
    std::map<Value, double, ValueLess> ema_;
};

} // namespace

std::unique_ptr<InstanceLogic> InstanceLogic::create(const OperatorSpec& op, double duration_us) {
    switch (op.kind) {
        case OpKind::Source:
        case OpKind::Sink:
        case OpKind::Map:
            return std::make_unique<PassLogic>();
        case OpKind::Filter:
            if (!op.filter) throw_invalid("filter " + op.id + " missing spec");
            return std::make_unique<FilterLogic>(*op.filter);
        case OpKind::FlatMap:
            return std::make_unique<FlatMapLogic>();
        case OpKind::WindowAggregate:
            if (!op.agg) throw_invalid("aggregate " + op.id + " missing spec");
            return std::make_unique<AggregateLogic>(*op.agg, duration_us);
        case OpKind::WindowJoin:
            if (!op.join) throw_invalid("join " + op.id + " missing spec");
            return std::make_unique<JoinLogic>(*op.join);
        case OpKind::Udo: {
            if (!op.udo) throw_invalid("udo " + op.id + " missing spec");
            switch (op.udo->behavior) {
                case UdoBehavior::SentimentScore: return std::make_unique<SentimentLogic>(*op.udo);
                case UdoBehavior::GeoBucket: return std::make_unique<GeoBucketLogic>(*op.udo);
                case UdoBehavior::MedianOutlier: return std::make_unique<MedianOutlierLogic>(*op.udo);
                case UdoBehavior::RoadMatch: return std::make_unique<RoadMatchLogic>(*op.udo);
                case UdoBehavior::TopicThreshold: return std::make_unique<TopicThresholdLogic>(*op.udo);
                case UdoBehavior::RollingCtr: return std::make_unique<RollingCtrLogic>(*op.udo);
            }
            break;
        }
    }
    throw_invalid("no logic for operator " + op.id);
}

} // namespace pdsp
