#include "lorafp/etrees.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lorafp/errors.hpp"
#include "lorafp/rng.hpp"

namespace lorafp {

void ExtraTreesConfig::validate() const {
    if (n_estimators < 1) throw ConfigError("etrees: n_estimators must be positive");
    if (min_samples_split < 2) throw ConfigError("etrees: min_samples_split must be >= 2");
    if (min_samples_leaf < 1) throw ConfigError("etrees: min_samples_leaf must be >= 1");
    if (min_samples_leaf > min_samples_split)
        throw ConfigError("etrees: min_samples_leaf must not exceed min_samples_split");
}

namespace {

struct TargetSums {
    double lat = 0.0, lat_sq = 0.0;
    double lon = 0.0, lon_sq = 0.0;
    std::size_t count = 0;

    void add(const LatLon& t) {
        lat += t.lat;
        lat_sq += t.lat * t.lat;
        lon += t.lon;
        lon_sq += t.lon * t.lon;
        ++count;
    }

    // Population variance summed over both output dimensions, times count.
    // (Summed form keeps the split score a pure difference of accumulator terms.)
    double weighted_variance() const {
        if (count == 0) return 0.0;
        double n = static_cast<double>(count);
        double v_lat = lat_sq - lat * lat / n;
        double v_lon = lon_sq - lon * lon / n;
        return std::max(0.0, v_lat) + std::max(0.0, v_lon);
    }

    LatLon mean() const {
        double n = static_cast<double>(count);
        return {lat / n, lon / n};
    }
};

class TreeBuilder {
public:
    TreeBuilder(const Matrix& features, std::span<const LatLon> targets,
                const ExtraTreesConfig& cfg, std::uint64_t tree_seed)
        : x_(features), y_(targets), cfg_(cfg), rng_(tree_seed) {
        order_.resize(y_.size());
        for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
    }

    Tree build() {
        Tree tree;
        grow(tree, 0, order_.size(), 0);
        return tree;
    }

private:
    // Grows the subtree over order_[begin, end) and returns its node id.
    std::uint32_t grow(Tree& tree, std::size_t begin, std::size_t end, std::size_t depth) {
        std::uint32_t id = static_cast<std::uint32_t>(tree.size());
        tree.emplace_back();
        std::size_t n = end - begin;

        TargetSums node_sums;
        for (std::size_t i = begin; i < end; ++i) node_sums.add(y_[order_[i]]);

        bool stop = n < cfg_.min_samples_split ||
                    (cfg_.max_depth != 0 && depth >= cfg_.max_depth) ||
                    targets_constant(begin, end);

        int best_feature = -1;
        double best_cut = 0.0;
        double best_score = -std::numeric_limits<double>::infinity();
        if (!stop) {
            double node_weighted_var = node_sums.weighted_variance();
            for (std::size_t f = 0; f < x_.cols(); ++f) {
                double lo = x_(order_[begin], f), hi = lo;
                for (std::size_t i = begin + 1; i < end; ++i) {
                    double v = x_(order_[i], f);
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
                if (lo == hi) continue;  // constant feature in this node

                // One uniform cut in (lo, hi]; the clamp repairs rounding at either end
                // so both children are guaranteed non-empty.
                double cut = lo + (hi - lo) * uniform_unit_open_low(rng_);
                if (!(cut > lo)) cut = std::nextafter(lo, hi);
                if (cut > hi) cut = hi;

                TargetSums left;
                std::size_t left_count = 0;
                for (std::size_t i = begin; i < end; ++i) {
                    if (x_(order_[i], f) < cut) {
                        left.add(y_[order_[i]]);
                        ++left_count;
                    }
                }
                std::size_t right_count = n - left_count;
                if (left_count < cfg_.min_samples_leaf || right_count < cfg_.min_samples_leaf)
                    continue;

                TargetSums right;
                right.lat = node_sums.lat - left.lat;
                right.lat_sq = node_sums.lat_sq - left.lat_sq;
                right.lon = node_sums.lon - left.lon;
                right.lon_sq = node_sums.lon_sq - left.lon_sq;
                right.count = right_count;

                double score = node_weighted_var - left.weighted_variance() - right.weighted_variance();
                if (score > best_score) {
                    best_score = score;
                    best_feature = static_cast<int>(f);
                    best_cut = cut;
                }
            }
        }

        if (best_feature < 0) {  // stopping rule hit, or every candidate was discarded
            tree[id].feature = -1;
            tree[id].prediction = node_sums.mean();
            tree[id].n_samples = static_cast<std::uint32_t>(n);
            return id;
        }

        // stable_partition keeps the residual sample order fully specified, so target
        // accumulation order (and with it the grown tree) is identical on every platform.
        auto mid_it = std::stable_partition(order_.begin() + begin, order_.begin() + end,
                                            [&](std::size_t s) { return x_(s, best_feature) < best_cut; });
        std::size_t mid = static_cast<std::size_t>(mid_it - order_.begin());

        tree[id].feature = best_feature;
        tree[id].cut = best_cut;
        tree[id].n_samples = static_cast<std::uint32_t>(n);
        std::uint32_t left_id = grow(tree, begin, mid, depth + 1);
        std::uint32_t right_id = grow(tree, mid, end, depth + 1);
        tree[id].left = left_id;
        tree[id].right = right_id;
        return id;
    }

    bool targets_constant(std::size_t begin, std::size_t end) const {
        const LatLon& first = y_[order_[begin]];
        for (std::size_t i = begin + 1; i < end; ++i)
            if (!(y_[order_[i]] == first)) return false;
        return true;
    }

    const Matrix& x_;
    std::span<const LatLon> y_;
    const ExtraTreesConfig& cfg_;
    Rng rng_;
    std::vector<std::size_t> order_;
};

LatLon route(const Tree& tree, std::span<const double> query) {
    std::uint32_t id = 0;
    while (!tree[id].is_leaf())
        id = query[static_cast<std::size_t>(tree[id].feature)] < tree[id].cut ? tree[id].left
                                                                              : tree[id].right;
    return tree[id].prediction;
}

}  // namespace

Forest Forest::fit(const Matrix& features, std::span<const LatLon> targets,
                   const ExtraTreesConfig& cfg) {
    cfg.validate();
    if (features.rows() == 0) throw FitError("etrees fit: empty training set");
    if (features.rows() != targets.size())
        throw FitError("etrees fit: feature rows and target count differ");
    for (std::size_t i = 0; i < features.rows() * features.cols(); ++i)
        if (!std::isfinite(features.data()[i])) throw FitError("etrees fit: non-finite feature value");

    Forest forest;
    forest.cfg_ = cfg;
    forest.feature_count_ = features.cols();
    forest.trees_.resize(cfg.n_estimators);

    const auto n_trees = static_cast<std::ptrdiff_t>(cfg.n_estimators);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t t = 0; t < n_trees; ++t) {
        TreeBuilder builder(features, targets, cfg,
                            derive_seed(static_cast<std::uint64_t>(cfg.seed),
                                        static_cast<std::uint64_t>(t)));
        forest.trees_[static_cast<std::size_t>(t)] = builder.build();
    }
    return forest;
}

LatLon Forest::predict(std::span<const double> query) const {
    if (query.size() != feature_count_)
        throw std::invalid_argument("etrees predict: query dimension " + std::to_string(query.size()) +
                                    " does not match feature count " + std::to_string(feature_count_));
    double lat = 0.0, lon = 0.0;
    for (const Tree& tree : trees_) {
        LatLon p = route(tree, query);
        lat += p.lat;
        lon += p.lon;
    }
    double n = static_cast<double>(trees_.size());
    return {lat / n, lon / n};
}

std::vector<LatLon> Forest::predict_batch(const Matrix& queries) const {
    if (queries.cols() != feature_count_)
        throw std::invalid_argument("etrees predict_batch: query dimension mismatch");
    std::vector<LatLon> out(queries.rows());
    const auto n = static_cast<std::ptrdiff_t>(queries.rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = predict(queries.row(static_cast<std::size_t>(i)));
    return out;
}

}  // namespace lorafp
