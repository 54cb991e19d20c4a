#pragma once

#include <vector>

#include "json.hpp"

#include "ml/features.hpp"
#include "util/rng.hpp"

namespace pdsp {

// DAG message-passing network over plan graphs: a per-node encoder, k rounds
// of mean aggregation along the directed edges, and a readout head at the
// sink node. Parameters flatten to one vector for optimization and for the
// finite-difference gradient check.
class Gnn {
public:
    Gnn() = default;
    Gnn(int in_dim, int hidden, int rounds, Rng& rng);

    double forward(const PlanGraph& g) const;

    double loss_and_grad(const std::vector<PlanGraph>& graphs, const std::vector<double>& ys,
                         std::vector<double>& grad) const;

    std::vector<double> params() const;
    void set_params(const std::vector<double>& flat);
    std::size_t param_count() const;

    int rounds() const { return rounds_; }
    int hidden() const { return hidden_; }

    nlohmann::json to_json() const;
    static Gnn from_json(const nlohmann::json& j);

private:
    struct ForwardCache;
    void forward_internal(const PlanGraph& g, ForwardCache& cache) const;

    int in_dim_ = 0;
    int hidden_ = 0;
    int rounds_ = 0;
    // encoder: hidden x in, bias hidden
    std::vector<double> enc_w_;
    std::vector<double> enc_b_;
    // per round: hidden x (2*hidden), bias hidden
    std::vector<std::vector<double>> round_w_;
    std::vector<std::vector<double>> round_b_;
    // readout: 1 x hidden + bias
    std::vector<double> out_w_;
    double out_b_ = 0;
};

} // namespace pdsp
