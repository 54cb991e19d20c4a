#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"

#include "util/rng.hpp"

namespace pdsp {

// Fully-connected net with rectified hidden layers and a linear scalar
// output. Parameters are exposed as one flat vector so the finite-difference
// gradient check can probe arbitrary coordinates.
class Mlp {
public:
    Mlp() = default;
    // sizes: input, hidden..., output
    Mlp(const std::vector<int>& sizes, Rng& rng);

    double forward(const std::vector<double>& x) const;

    // Squared-error loss 0.5*(y_hat - y)^2 summed over the batch, averaged;
    // grad aligns with params().
    double loss_and_grad(const std::vector<std::vector<double>>& xs, const std::vector<double>& ys,
                         std::vector<double>& grad) const;

    std::vector<double> params() const;
    void set_params(const std::vector<double>& flat);
    std::size_t param_count() const;

    const std::vector<int>& sizes() const { return sizes_; }

    nlohmann::json to_json() const;
    static Mlp from_json(const nlohmann::json& j);

private:
    friend class Gnn;
    std::vector<int> sizes_;
    std::vector<std::vector<double>> weights_; // per layer, (out x in) row-major
    std::vector<std::vector<double>> biases_;
};

// Adam update state over a flat parameter vector.
struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::int64_t t = 0;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    explicit AdamState(std::size_t n, double learning_rate)
        : m(n, 0.0), v(n, 0.0), lr(learning_rate) {}

    void step(std::vector<double>& params, const std::vector<double>& grad);
};

} // namespace pdsp
