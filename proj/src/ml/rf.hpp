#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"

#include "util/rng.hpp"

namespace pdsp {

// Bagged CART regression trees with variance (SSE) splits. No feature
// subsampling; per-tree bootstrap seeds derive from the forest seed so
// training is reproducible.
struct TreeNode {
    int feature = -1; // -1: leaf
    double threshold = 0;
    std::size_t left = 0;
    std::size_t right = 0;
    double value = 0;
};

struct RegressionTree {
    std::vector<TreeNode> nodes;

    double predict(const std::vector<double>& x) const;
};

struct ForestConfig {
    int trees = 100;
    int max_depth = 12; // 0 = unlimited
    int min_samples_split = 2;
    bool bootstrap = true;
};

class Forest {
public:
    Forest() = default;

    static Forest fit(const std::vector<std::vector<double>>& xs, const std::vector<double>& ys,
                      const ForestConfig& config, std::uint64_t seed);

    // mean of the per-tree predictions
    double predict(const std::vector<double>& x) const;

    const std::vector<RegressionTree>& trees() const { return trees_; }

    nlohmann::json to_json() const;
    static Forest from_json(const nlohmann::json& j);

private:
    std::vector<RegressionTree> trees_;
};

} // namespace pdsp
