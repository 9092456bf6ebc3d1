#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lorafp/dataset.hpp"
#include "lorafp/eval.hpp"
#include "lorafp/knn.hpp"
#include "lorafp/matrix.hpp"
#include "lorafp/metrics.hpp"
#include "lorafp/represent.hpp"

namespace lorafp {

// Plain serial counterparts of the OpenMP code paths. They follow the same
// per-element accumulation order, so the parallel kernels must match them
// bit-for-bit; tests and the benchmark rely on that.

void ref_gemm_nt(const Matrix& a, const Matrix& b, Matrix& c);
void ref_gemm_nn(const Matrix& a, const Matrix& b, Matrix& c);
void ref_gemm_tn(const Matrix& a, const Matrix& b, Matrix& c);

// Brute-force nearest neighbours: computes every distance, sorts the whole list by
// (distance, index), returns the first k. Deliberately a different algorithm from the
// heap selection in KnnModel.
std::vector<Neighbor> ref_knn_topk(const Matrix& train, MetricKind metric,
                                   std::span<const double> query, std::size_t k);

// Serial counterpart of transform_batch.
Matrix ref_transform_batch(const RepresentationConfig& cfg, const Dataset& d,
                           std::span<const std::size_t> indices);

// Serial counterpart of haversine_errors.
std::vector<double> ref_haversine_errors(std::span<const LatLon> predicted,
                                         std::span<const LatLon> actual);

}  // namespace lorafp
