#include "ml/gnn.hpp"

#include <algorithm>
#include <cmath>

namespace pdsp {

Gnn::Gnn(int in_dim, int hidden, int rounds, Rng& rng)
    : in_dim_(in_dim), hidden_(hidden), rounds_(rounds) {
    if (in_dim < 1 || hidden < 1 || rounds < 1) throw_invalid("gnn dimensions must be positive");
    auto init = [&](std::vector<double>& w, int fan_in) {
        double scale = std::sqrt(2.0 / static_cast<double>(fan_in));
        for (auto& x : w) x = rng.uniform(-scale, scale);
    };
    enc_w_.resize(static_cast<std::size_t>(hidden) * in_dim);
    init(enc_w_, in_dim);
    enc_b_.assign(static_cast<std::size_t>(hidden), 0.0);
    for (int r = 0; r < rounds; ++r) {
        std::vector<double> w(static_cast<std::size_t>(hidden) * 2 * hidden);
        init(w, 2 * hidden);
        round_w_.push_back(std::move(w));
        round_b_.push_back(std::vector<double>(static_cast<std::size_t>(hidden), 0.0));
    }
    out_w_.resize(static_cast<std::size_t>(hidden));
    init(out_w_, hidden);
}

struct Gnn::ForwardCache {
    // h[r][v]: hidden state of node v entering round r (h[0] after encoder)
    std::vector<std::vector<std::vector<double>>> h;
    std::vector<std::vector<std::vector<double>>> pre; // pre-activation per round per node
    std::vector<std::vector<double>> enc_pre;
    std::vector<std::vector<std::vector<std::size_t>>> msg_order; // per round per node: ordered preds
    std::vector<std::vector<std::size_t>> preds;                  // per node
    double output = 0;
};

void Gnn::forward_internal(const PlanGraph& g, ForwardCache& cache) const {
    const std::size_t n = g.node_features.size();
    const auto H = static_cast<std::size_t>(hidden_);

    cache.preds.assign(n, {});
    for (const auto& [from, to] : g.edges) cache.preds[to].push_back(from);

    // encoder
    cache.enc_pre.assign(n, std::vector<double>(H, 0.0));
    cache.h.assign(static_cast<std::size_t>(rounds_) + 1, {});
    cache.pre.assign(static_cast<std::size_t>(rounds_), {});
    cache.msg_order.assign(static_cast<std::size_t>(rounds_), {});
    cache.h[0].assign(n, std::vector<double>(H, 0.0));
    for (std::size_t v = 0; v < n; ++v) {
        const auto& x = g.node_features[v];
        for (std::size_t o = 0; o < H; ++o) {
            double acc = enc_b_[o];
            const double* row = &enc_w_[o * static_cast<std::size_t>(in_dim_)];
            for (int i = 0; i < in_dim_; ++i) acc += row[i] * x[static_cast<std::size_t>(i)];
            cache.enc_pre[v][o] = acc;
            cache.h[0][v][o] = acc > 0 ? acc : 0.0;
        }
    }

    for (int r = 0; r < rounds_; ++r) {
        auto& next = cache.h[static_cast<std::size_t>(r) + 1];
        auto& pre = cache.pre[static_cast<std::size_t>(r)];
        auto& orders = cache.msg_order[static_cast<std::size_t>(r)];
        next.assign(n, std::vector<double>(H, 0.0));
        pre.assign(n, std::vector<double>(H, 0.0));
        orders.assign(n, {});
        const auto& cur = cache.h[static_cast<std::size_t>(r)];
        for (std::size_t v = 0; v < n; ++v) {
            // mean message over predecessors, accumulated in a canonical
            // (value-sorted) order so node relabeling cannot change the sum
            std::vector<double> msg(H, 0.0);
            auto order = cache.preds[v];
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return std::lexicographical_compare(cur[a].begin(), cur[a].end(), cur[b].begin(),
                                                    cur[b].end());
            });
            orders[v] = order;
            if (!order.empty()) {
                for (std::size_t u : order)
                    for (std::size_t o = 0; o < H; ++o) msg[o] += cur[u][o];
                double inv = 1.0 / static_cast<double>(order.size());
                for (auto& m : msg) m *= inv;
            }
            const auto& w = round_w_[static_cast<std::size_t>(r)];
            const auto& b = round_b_[static_cast<std::size_t>(r)];
            for (std::size_t o = 0; o < H; ++o) {
                double acc = b[o];
                const double* row = &w[o * 2 * H];
                for (std::size_t i = 0; i < H; ++i) acc += row[i] * cur[v][i];
                for (std::size_t i = 0; i < H; ++i) acc += row[H + i] * msg[i];
                pre[v][o] = acc;
                next[v][o] = acc > 0 ? acc : 0.0;
            }
        }
    }

    const auto& sink = cache.h[static_cast<std::size_t>(rounds_)][g.sink_node];
    double y = out_b_;
    for (std::size_t o = 0; o < H; ++o) y += out_w_[o] * sink[o];
    cache.output = y;
}

double Gnn::forward(const PlanGraph& g) const {
    ForwardCache cache;
    forward_internal(g, cache);
    return cache.output;
}

double Gnn::loss_and_grad(const std::vector<PlanGraph>& graphs, const std::vector<double>& ys,
                          std::vector<double>& grad) const {
    grad.assign(param_count(), 0.0);
    if (graphs.empty()) return 0.0;
    const auto H = static_cast<std::size_t>(hidden_);

    // flat layout: enc_w, enc_b, round_w[0], round_b[0], ..., out_w, out_b
    std::size_t enc_w_off = 0;
    std::size_t enc_b_off = enc_w_off + enc_w_.size();
    std::vector<std::size_t> rw_off(static_cast<std::size_t>(rounds_));
    std::vector<std::size_t> rb_off(static_cast<std::size_t>(rounds_));
    std::size_t pos = enc_b_off + enc_b_.size();
    for (int r = 0; r < rounds_; ++r) {
        rw_off[static_cast<std::size_t>(r)] = pos;
        pos += round_w_[static_cast<std::size_t>(r)].size();
        rb_off[static_cast<std::size_t>(r)] = pos;
        pos += round_b_[static_cast<std::size_t>(r)].size();
    }
    std::size_t ow_off = pos;
    std::size_t ob_off = ow_off + out_w_.size();

    double loss = 0;
    ForwardCache cache;
    for (std::size_t n_i = 0; n_i < graphs.size(); ++n_i) {
        const auto& g = graphs[n_i];
        forward_internal(g, cache);
        double err = cache.output - ys[n_i];
        loss += 0.5 * err * err;

        const std::size_t n = g.node_features.size();
        // d loss / d h[rounds][v]
        std::vector<std::vector<double>> dh(n, std::vector<double>(H, 0.0));
        const auto& sink = cache.h[static_cast<std::size_t>(rounds_)][g.sink_node];
        for (std::size_t o = 0; o < H; ++o) {
            grad[ow_off + o] += err * sink[o];
            dh[g.sink_node][o] += err * out_w_[o];
        }
        grad[ob_off] += err;

        for (int r = rounds_; r-- > 0;) {
            const auto& cur = cache.h[static_cast<std::size_t>(r)];
            const auto& pre = cache.pre[static_cast<std::size_t>(r)];
            const auto& orders = cache.msg_order[static_cast<std::size_t>(r)];
            const auto& w = round_w_[static_cast<std::size_t>(r)];
            std::vector<std::vector<double>> dprev(n, std::vector<double>(H, 0.0));
            for (std::size_t v = 0; v < n; ++v) {
                // delta through the relu
                std::vector<double> delta(H);
                for (std::size_t o = 0; o < H; ++o)
                    delta[o] = pre[v][o] > 0 ? dh[v][o] : 0.0;

                // rebuild the message for weight grads
                std::vector<double> msg(H, 0.0);
                const auto& order = orders[v];
                double inv = order.empty() ? 0.0 : 1.0 / static_cast<double>(order.size());
                for (std::size_t u : order)
                    for (std::size_t o = 0; o < H; ++o) msg[o] += cur[u][o];
                for (auto& m : msg) m *= inv;

                double* gw = &grad[rw_off[static_cast<std::size_t>(r)]];
                double* gb = &grad[rb_off[static_cast<std::size_t>(r)]];
                for (std::size_t o = 0; o < H; ++o) {
                    double d = delta[o];
                    if (d == 0.0) continue;
                    gb[o] += d;
                    double* grow = &gw[o * 2 * H];
                    for (std::size_t i = 0; i < H; ++i) {
                        grow[i] += d * cur[v][i];
                        grow[H + i] += d * msg[i];
                    }
                    const double* row = &w[o * 2 * H];
                    for (std::size_t i = 0; i < H; ++i) {
                        dprev[v][i] += d * row[i];
                        if (!order.empty()) {
                            double through_msg = d * row[H + i] * inv;
                            for (std::size_t u : order) dprev[u][i] += through_msg;
                        }
                    }
                }
            }
            dh = std::move(dprev);
        }

        // encoder
        for (std::size_t v = 0; v < n; ++v) {
            const auto& x = g.node_features[v];
            for (std::size_t o = 0; o < H; ++o) {
                double d = cache.enc_pre[v][o] > 0 ? dh[v][o] : 0.0;
                if (d == 0.0) continue;
                grad[enc_b_off + o] += d;
                double* grow = &grad[enc_w_off + o * static_cast<std::size_t>(in_dim_)];
                for (int i = 0; i < in_dim_; ++i) grow[i] += d * x[static_cast<std::size_t>(i)];
            }
        }
    }

    double inv = 1.0 / static_cast<double>(graphs.size());
    for (auto& g2 : grad) g2 *= inv;
    return loss * inv;
}

std::vector<double> Gnn::params() const {
    std::vector<double> flat;
    flat.reserve(param_count());
    flat.insert(flat.end(), enc_w_.begin(), enc_w_.end());
    flat.insert(flat.end(), enc_b_.begin(), enc_b_.end());
    for (int r = 0; r < rounds_; ++r) {
        flat.insert(flat.end(), round_w_[static_cast<std::size_t>(r)].begin(),
                    round_w_[static_cast<std::size_t>(r)].end());
        flat.insert(flat.end(), round_b_[static_cast<std::size_t>(r)].begin(),
                    round_b_[static_cast<std::size_t>(r)].end());
    }
    flat.insert(flat.end(), out_w_.begin(), out_w_.end());
    flat.push_back(out_b_);
    return flat;
}

void Gnn::set_params(const std::vector<double>& flat) {
    if (flat.size() != param_count()) throw_invalid("gnn parameter vector size mismatch");
    std::size_t pos = 0;
    auto take = [&](std::vector<double>& dst) {
        std::copy(flat.begin() + static_cast<std::ptrdiff_t>(pos),
                  flat.begin() + static_cast<std::ptrdiff_t>(pos + dst.size()), dst.begin());
        pos += dst.size();
    };
    take(enc_w_);
    take(enc_b_);
    for (int r = 0; r < rounds_; ++r) {
        take(round_w_[static_cast<std::size_t>(r)]);
        take(round_b_[static_cast<std::size_t>(r)]);
    }
    take(out_w_);
    out_b_ = flat[pos];
}

std::size_t Gnn::param_count() const {
    std::size_t n = enc_w_.size() + enc_b_.size() + out_w_.size() + 1;
    for (int r = 0; r < rounds_; ++r)
        n += round_w_[static_cast<std::size_t>(r)].size() + round_b_[static_cast<std::size_t>(r)].size();
    return n;
}

nlohmann::json Gnn::to_json() const {
    nlohmann::json j;
    j["in_dim"] = in_dim_;
    j["hidden"] = hidden_;
    j["rounds"] = rounds_;
    j["enc_w"] = enc_w_;
    j["enc_b"] = enc_b_;
    j["round_w"] = round_w_;
    j["round_b"] = round_b_;
    j["out_w"] = out_w_;
    j["out_b"] = out_b_;
    return j;
}

Gnn Gnn::from_json(const nlohmann::json& j) {
    Gnn g;
    g.in_dim_ = j.at("in_dim").get<int>();
    g.hidden_ = j.at("hidden").get<int>();
    g.rounds_ = j.at("rounds").get<int>();
    g.enc_w_ = j.at("enc_w").get<std::vector<double>>();
    g.enc_b_ = j.at("enc_b").get<std::vector<double>>();
    g.round_w_ = j.at("round_w").get<std::vector<std::vector<double>>>();
    g.round_b_ = j.at("round_b").get<std::vector<std::vector<double>>>();
    g.out_w_ = j.at("out_w").get<std::vector<double>>();
    g.out_b_ = j.at("out_b").get<double>();
    return g;
}

} // namespace pdsp
