#include "ml/mlp.hpp"

#include <cmath>

namespace pdsp {

Mlp::Mlp(const std::vector<int>& sizes, Rng& rng) : sizes_(sizes) {
    if (sizes.size() < 2) throw_invalid("mlp needs input and output sizes");
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        int in = sizes[l], out = sizes[l + 1];
        if (in < 1 || out < 1) throw_invalid("mlp layer sizes must be positive");
        // He-style scaling keeps rectified activations in range
        double scale = std::sqrt(2.0 / static_cast<double>(in));
        std::vector<double> w(static_cast<std::size_t>(in) * out);
        for (auto& x : w) x = rng.uniform(-scale, scale);
        weights_.push_back(std::move(w));
        biases_.push_back(std::vector<double>(static_cast<std::size_t>(out), 0.0));
    }
}

double Mlp::forward(const std::vector<double>& x) const {
    std::vector<double> a = x;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        int in = sizes_[l], out = sizes_[l + 1];
        std::vector<double> z(static_cast<std::size_t>(out));
        for (int o = 0; o < out; ++o) {
            double acc = biases_[l][static_cast<std::size_t>(o)];
            const double* row = &weights_[l][static_cast<std::size_t>(o) * in];
            for (int i = 0; i < in; ++i) acc += row[i] * a[static_cast<std::size_t>(i)];
            z[static_cast<std::size_t>(o)] = acc;
        }
        bool last = l + 1 == weights_.size();
        if (!last)
            for (auto& v : z) v = v > 0 ? v : 0.0;
        a = std::move(z);
    }
    return a[0];
}

double Mlp::loss_and_grad(const std::vector<std::vector<double>>& xs, const std::vector<double>& ys,
                          std::vector<double>& grad) const {
    grad.assign(param_count(), 0.0);
    if (xs.empty()) return 0.0;

    double loss = 0.0;
    std::vector<std::vector<double>> acts(weights_.size() + 1);
    std::vector<std::vector<double>> pre(weights_.size());

    for (std::size_t n = 0; n < xs.size(); ++n) {
        acts[0] = xs[n];
        for (std::size_t l = 0; l < weights_.size(); ++l) {
            int in = sizes_[l], out = sizes_[l + 1];
            pre[l].assign(static_cast<std::size_t>(out), 0.0);
            for (int o = 0; o < out; ++o) {
                double acc = biases_[l][static_cast<std::size_t>(o)];
                const double* row = &weights_[l][static_cast<std::size_t>(o) * in];
                for (int i = 0; i < in; ++i) acc += row[i] * acts[l][static_cast<std::size_t>(i)];
                pre[l][static_cast<std::size_t>(o)] = acc;
            }
            acts[l + 1] = pre[l];
            if (l + 1 < weights_.size())
                for (auto& v : acts[l + 1]) v = v > 0 ? v : 0.0;
        }
        double err = acts.back()[0] - ys[n];
        loss += 0.5 * err * err;

        // backprop
        std::vector<double> delta = {err};
        std::size_t offset = grad.size();
        for (std::size_t l = weights_.size(); l-- > 0;) {
            int in = sizes_[l], out = sizes_[l + 1];
            offset -= static_cast<std::size_t>(in) * out + static_cast<std::size_t>(out);
            double* gw = &grad[offset];
            double* gb = &grad[offset + static_cast<std::size_t>(in) * out];
            for (int o = 0; o < out; ++o) {
                double d = delta[static_cast<std::size_t>(o)];
                gb[o] += d;
                const auto& a = acts[l];
                for (int i = 0; i < in; ++i) gw[static_cast<std::size_t>(o) * in + i] += d * a[static_cast<std::size_t>(i)];
            }
            if (l > 0) {
                std::vector<double> prev(static_cast<std::size_t>(in), 0.0);
                for (int i = 0; i < in; ++i) {
                    double acc = 0;
                    for (int o = 0; o < out; ++o)
                        acc += weights_[l][static_cast<std::size_t>(o) * in + i] *
                               delta[static_cast<std::size_t>(o)];
                    // relu mask of the previous layer's pre-activation
                    prev[static_cast<std::size_t>(i)] =
                        pre[l - 1][static_cast<std::size_t>(i)] > 0 ? acc : 0.0;
                }
                delta = std::move(prev);
            }
        }
    }

    double inv = 1.0 / static_cast<double>(xs.size());
    for (auto& g : grad) g *= inv;
    return loss * inv;
}

std::vector<double> Mlp::params() const {
    std::vector<double> flat;
    flat.reserve(param_count());
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        flat.insert(flat.end(), weights_[l].begin(), weights_[l].end());
        flat.insert(flat.end(), biases_[l].begin(), biases_[l].end());
    }
    return flat;
}

void Mlp::set_params(const std::vector<double>& flat) {
    if (flat.size() != param_count()) throw_invalid("mlp parameter vector size mismatch");
    std::size_t pos = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        std::copy(flat.begin() + static_cast<std::ptrdiff_t>(pos),
                  flat.begin() + static_cast<std::ptrdiff_t>(pos + weights_[l].size()),
                  weights_[l].begin());
        pos += weights_[l].size();
        std::copy(flat.begin() + static_cast<std::ptrdiff_t>(pos),
                  flat.begin() + static_cast<std::ptrdiff_t>(pos + biases_[l].size()),
                  biases_[l].begin());
        pos += biases_[l].size();
    }
}

std::size_t Mlp::param_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) n += weights_[l].size() + biases_[l].size();
    return n;
}

nlohmann::json Mlp::to_json() const {
    nlohmann::json j;
    j["sizes"] = sizes_;
    j["weights"] = weights_;
    j["biases"] = biases_;
    return j;
}

Mlp Mlp::from_json(const nlohmann::json& j) {
    Mlp m;
    m.sizes_ = j.at("sizes").get<std::vector<int>>();
    m.weights_ = j.at("weights").get<std::vector<std::vector<double>>>();
    m.biases_ = j.at("biases").get<std::vector<std::vector<double>>>();
    return m;
}

void AdamState::step(std::vector<double>& params, const std::vector<double>& grad) {
    if (params.size() != m.size() || grad.size() != m.size())
        throw_invalid("adam state size mismatch");
    ++t;
    double b1t = 1.0 - std::pow(beta1, static_cast<double>(t));
    double b2t = 1.0 - std::pow(beta2, static_cast<double>(t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        m[i] = beta1 * m[i] + (1 - beta1) * grad[i];
        v[i] = beta2 * v[i] + (1 - beta2) * grad[i] * grad[i];
        params[i] -= lr * (m[i] / b1t) / (std::sqrt(v[i] / b2t) + eps);
    }
}

} // namespace pdsp
