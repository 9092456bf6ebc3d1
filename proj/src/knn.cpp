#include "lorafp/knn.hpp"

#include <algorithm>
#include <stdexcept>

#include "lorafp/errors.hpp"

namespace lorafp {

KnnModel KnnModel::fit(Matrix features, std::vector<LatLon> coords, MetricKind metric, std::size_t k) {
    if (features.rows() == 0) throw ConfigError("knn fit: empty training data");
    if (features.rows() != coords.size())
        throw ConfigError("knn fit: feature rows (" + std::to_string(features.rows()) +
                          ") and coordinate count (" + std::to_string(coords.size()) + ") differ");
    if (k < 1 || k > features.rows())
        throw ConfigError("knn fit: k = " + std::to_string(k) + " must be in 1.." +
                          std::to_string(features.rows()));
    KnnModel m;
    m.features_ = std::move(features);
    m.coords_ = std::move(coords);
    m.metric_ = metric;
    m.k_ = k;
    return m;
}

namespace {

inline bool closer(const Neighbor& a, const Neighbor& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
}

// Bounded selection: max-heap of the k_max best (distance, index) pairs seen so far,
// then an ascending sort of the survivors.
void scan_topk(const Matrix& features, MetricFn metric, std::span<const double> query,
               std::size_t k_max, std::vector<Neighbor>& out) {
    out.clear();
    out.reserve(k_max + 1);
    const std::size_t n = features.rows();
    const std::size_t dim = features.cols();
    const double* base = features.data();
    for (std::size_t i = 0; i < n; ++i) {
        Neighbor cand{i, metric(base + i * dim, query.data(), dim)};
        if (out.size() < k_max) {
            out.push_back(cand);
            std::push_heap(out.begin(), out.end(), closer);
        } else if (closer(cand, out.front())) {
            std::pop_heap(out.begin(), out.end(), closer);
            out.back() = cand;
            std::push_heap(out.begin(), out.end(), closer);
        }
    }
    std::sort_heap(out.begin(), out.end(), closer);
}

}  // namespace

LatLon KnnModel::aggregate(std::span<const Neighbor> neighbors, std::size_t k,
                           std::span<const LatLon> coords) {
    double lat = 0.0, lon = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        lat += coords[neighbors[i].index].lat;
        lon += coords[neighbors[i].index].lon;
    }
    return {lat / static_cast<double>(k), lon / static_cast<double>(k)};
}

std::vector<Neighbor> KnnModel::predict_topk(std::span<const double> query, std::size_t k_max) const {
    if (query.size() != dimension())
        throw std::invalid_argument("knn predict: query dimension " + std::to_string(query.size()) +
                                    " does not match feature dimension " + std::to_string(dimension()));
    if (k_max < 1 || k_max > size())
        throw ConfigError("knn predict_topk: k_max = " + std::to_string(k_max) + " must be in 1.." +
                          std::to_string(size()));
    std::vector<Neighbor> out;
    scan_topk(features_, metric_function(metric_), query, k_max, out);
    return out;
}

LatLon KnnModel::predict(std::span<const double> query) const {
    auto neighbors = predict_topk(query, k_);
    return aggregate(neighbors, k_, coords_);
}

std::vector<LatLon> KnnModel::predict_batch(const Matrix& queries) const {
    if (queries.cols() != dimension())
        throw std::invalid_argument("knn predict_batch: query dimension mismatch");
    std::vector<LatLon> out(queries.rows());
    const auto n = static_cast<std::ptrdiff_t>(queries.rows());
    MetricFn metric = metric_function(metric_);
#pragma omp parallel
    {
        std::vector<Neighbor> scratch;
#pragma omp for schedule(static)
        for (std::ptrdiff_t q = 0; q < n; ++q) {
            scan_topk(features_, metric, queries.row(static_cast<std::size_t>(q)), k_, scratch);
            out[static_cast<std::size_t>(q)] = aggregate(scratch, k_, coords_);
        }
    }
    return out;
}

std::vector<std::vector<Neighbor>> KnnModel::predict_topk_batch(const Matrix& queries,
                                                                std::size_t k_max) const {
    if (queries.cols() != dimension())
        throw std::invalid_argument("knn predict_topk_batch: query dimension mismatch");
    if (k_max < 1 || k_max > size())
        throw ConfigError("knn predict_topk_batch: k_max = " + std::to_string(k_max) +
                          " must be in 1.." + std::to_string(size()));
    std::vector<std::vector<Neighbor>> out(queries.rows());
    const auto n = static_cast<std::ptrdiff_t>(queries.rows());
    MetricFn metric = metric_function(metric_);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t q = 0; q < n; ++q)
        scan_topk(features_, metric, queries.row(static_cast<std::size_t>(q)), k_max,
                  out[static_cast<std::size_t>(q)]);
    return out;
}

}  // namespace lorafp
