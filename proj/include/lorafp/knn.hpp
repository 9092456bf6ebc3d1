#pragma once

#include <span>
#include <vector>

#include "lorafp/eval.hpp"
#include "lorafp/matrix.hpp"
#include "lorafp/metrics.hpp"

namespace lorafp {

// A nearest neighbor hit. Ordering is lexicographic (distance, then training index),
// which is the tie rule used everywhere in this library.
struct Neighbor {
    std::size_t index = 0;
    double distance = 0.0;

    bool operator==(const Neighbor&) const = default;
};

// k-nearest-neighbor position regressor. A lazy learner: fit() stores the training
// data verbatim; all work happens during prediction. Immutable after fit, so batch
// prediction may hit it from many threads.
class KnnModel {
public:
    // Throws ConfigError when k < 1, k > N, or the data is empty/mismatched.
    static KnnModel fit(Matrix features, std::vector<LatLon> coords, MetricKind metric, std::size_t k);

    std::size_t size() const { return features_.rows(); }
    std::size_t dimension() const { return features_.cols(); }
    std::size_t k() const { return k_; }
    MetricKind metric() const { return metric_; }
    const Matrix& features() const { return features_; }
    std::span<const LatLon> coords() const { return coords_; }

    // Unweighted mean of the coordinates of the k nearest training rows; ties broken
    // by lower training index.
    LatLon predict(std::span<const double> query) const;

    // The k_max nearest training rows in nondecreasing (distance, index) order.
    // predict() for any k <= k_max is the mean over the first k entries.
    std::vector<Neighbor> predict_topk(std::span<const double> query, std::size_t k_max) const;

    // Batch versions, OpenMP-parallel over queries. Results are independent of the
    // partitioning: element i always equals the single-query call on row i.
    std::vector<LatLon> predict_batch(const Matrix& queries) const;
    std::vector<std::vector<Neighbor>> predict_topk_batch(const Matrix& queries, std::size_t k_max) const;

    // Mean coordinates of the first k entries of a neighbor list.
    static LatLon aggregate(std::span<const Neighbor> neighbors, std::size_t k, std::span<const LatLon> coords);

private:
    Matrix features_;
    std::vector<LatLon> coords_;
    MetricKind metric_ = MetricKind::Euclidean;
    std::size_t k_ = 1;
};

}  // namespace lorafp
