#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lorafp/eval.hpp"
#include "lorafp/matrix.hpp"

namespace lorafp {

struct ExtraTreesConfig {
    std::size_t n_estimators = 100;
    std::size_t min_samples_split = 2;
    std::size_t min_samples_leaf = 1;
    std::size_t max_depth = 0;  // 0 = unlimited
    std::int64_t seed = 0;

    // Throws ConfigError on violated invariants.
    void validate() const;
};

// Either an internal split (feature >= 0, children partition by value < cut vs >= cut)
// or a leaf (feature == -1) predicting the mean of its resident training targets.
struct TreeNode {
    int feature = -1;
    double cut = 0.0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    LatLon prediction{};
    std::uint32_t n_samples = 0;

    bool is_leaf() const { return feature < 0; }
    bool operator==(const TreeNode&) const = default;
};

// Nodes in preorder; index 0 is the root.
using Tree = std::vector<TreeNode>;

// Extremely randomized trees: every tree sees the full training set (no bootstrap);
// each split draws one uniform random cut per non-constant feature and keeps the
// (feature, cut) with the largest variance reduction summed over both output
// dimensions. Per-tree RNG streams derive from (seed, tree index), so growing is
// parallel across trees yet bit-reproducible for any schedule.
class Forest {
public:
    static Forest fit(const Matrix& features, std::span<const LatLon> targets,
                      const ExtraTreesConfig& cfg);

    LatLon predict(std::span<const double> query) const;
    std::vector<LatLon> predict_batch(const Matrix& queries) const;

    std::size_t feature_count() const { return feature_count_; }
    const std::vector<Tree>& trees() const { return trees_; }
    const ExtraTreesConfig& config() const { return cfg_; }

private:
    std::vector<Tree> trees_;
    std::size_t feature_count_ = 0;
    ExtraTreesConfig cfg_;
};

}  // namespace lorafp
