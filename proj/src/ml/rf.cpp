#include "ml/rf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pdsp {

double RegressionTree::predict(const std::vector<double>& x) const {
    std::size_t i = 0;
    while (nodes[i].feature >= 0)
        i = x[static_cast<std::size_t>(nodes[i].feature)] <= nodes[i].threshold ? nodes[i].left
                                                                                : nodes[i].right;
    return nodes[i].value;
}

namespace {

struct TreeBuilder {
    const std::vector<std::vector<double>>& xs;
    const std::vector<double>& ys;
    const ForestConfig& config;
    RegressionTree tree;

    std::size_t build(std::vector<std::size_t> idx, int depth) {
        double sum = 0, sq = 0;
        for (auto i : idx) {
            sum += ys[i];
            sq += ys[i] * ys[i];
        }
        double n = static_cast<double>(idx.size());
        double mean = sum / n;
        double sse = sq - sum * sum / n;

        std::size_t node_idx = tree.nodes.size();
        tree.nodes.push_back(TreeNode{-1, 0, 0, 0, mean});
        bool depth_ok = config.max_depth == 0 || depth < config.max_depth;
        if (!depth_ok || idx.size() < static_cast<std::size_t>(config.min_samples_split) || sse <= 1e-12)
            return node_idx;

        // best SSE-reducing split over all features; first best wins ties
        int best_feature = -1;
        double best_threshold = 0;
        double best_score = sse - 1e-12;
        const std::size_t n_features = xs[idx[0]].size();
        std::vector<std::size_t> sorted = idx;
        for (std::size_t f = 0; f < n_features; ++f) {
            std::sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
                if (xs[a][f] != xs[b][f]) return xs[a][f] < xs[b][f];
                return a < b;
            });
            double left_sum = 0, left_sq = 0;
            for (std::size_t k = 0; k + 1 < sorted.size(); ++k) {
                double y = ys[sorted[k]];
                left_sum += y;
                left_sq += y * y;
                if (xs[sorted[k]][f] == xs[sorted[k + 1]][f]) continue;
                double ln = static_cast<double>(k + 1);
                double rn = n - ln;
                double rsum = sum - left_sum, rsq = sq - left_sq;
                double score = (left_sq - left_sum * left_sum / ln) + (rsq - rsum * rsum / rn);
                if (score < best_score) {
                    best_score = score;
                    best_feature = static_cast<int>(f);
                    best_threshold = (xs[sorted[k]][f] + xs[sorted[k + 1]][f]) / 2.0;
                }
            }
        }
        if (best_feature < 0) return node_idx;

        std::vector<std::size_t> left, right;
        for (auto i : idx)
            (xs[i][static_cast<std::size_t>(best_feature)] <= best_threshold ? left : right)
                .push_back(i);
        if (left.empty() || right.empty()) return node_idx;

        tree.nodes[node_idx].feature = best_feature;
        tree.nodes[node_idx].threshold = best_threshold;
        std::size_t l = build(std::move(left), depth + 1);
        tree.nodes[node_idx].left = l;
        std::size_t r = build(std::move(right), depth + 1);
        tree.nodes[node_idx].right = r;
        return node_idx;
    }
};

} // namespace

Forest Forest::fit(const std::vector<std::vector<double>>& xs, const std::vector<double>& ys,
                   const ForestConfig& config, std::uint64_t seed) {
    if (xs.empty() || xs.size() != ys.size()) throw_invalid("forest fit: bad training data");
    if (config.trees < 1) throw_invalid("forest needs at least one tree");
    Forest forest;
    for (int t = 0; t < config.trees; ++t) {
        std::vector<std::size_t> idx;
        if (config.bootstrap) {
            Rng rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
            for (std::size_t i = 0; i < xs.size(); ++i) idx.push_back(rng.below(xs.size()));
            std::sort(idx.begin(), idx.end());
        } else {
            idx.resize(xs.size());
            std::iota(idx.begin(), idx.end(), 0);
        }
        TreeBuilder builder{xs, ys, config, RegressionTree{}};
        builder.build(std::move(idx), 0);
        forest.trees_.push_back(std::move(builder.tree));
    }
    return forest;
}

double Forest::predict(const std::vector<double>& x) const {
    if (trees_.empty()) throw_invalid("forest not fitted");
    double sum = 0;
    for (const auto& t : trees_) sum += t.predict(x);
    return sum / static_cast<double>(trees_.size());
}

nlohmann::json Forest::to_json() const {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : trees_) {
        nlohmann::json nodes = nlohmann::json::array();
        for (const auto& n : t.nodes)
            nodes.push_back({{"f", n.feature}, {"t", n.threshold}, {"l", n.left}, {"r", n.right},
                             {"v", n.value}});
        trees.push_back(std::move(nodes));
    }
    return {{"trees", trees}};
}

Forest Forest::from_json(const nlohmann::json& j) {
    Forest f;
    for (const auto& jt : j.at("trees")) {
        RegressionTree tree;
        for (const auto& jn : jt)
            tree.nodes.push_back(TreeNode{jn.at("f").get<int>(), jn.at("t").get<double>(),
                                          jn.at("l").get<std::size_t>(), jn.at("r").get<std::size_t>(),
                                          jn.at("v").get<double>()});
        f.trees_.push_back(std::move(tree));
    }
    return f;
}

} // namespace pdsp
