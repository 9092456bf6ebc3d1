#include "lorafp/reference.hpp"

#include <algorithm>
#include <stdexcept>

namespace lorafp {

namespace {

void check(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void ref_gemm_nt(const Matrix& a, const Matrix& b, Matrix& c) {
    check(a.cols() == b.cols(), "ref_gemm_nt: inner dimensions differ");
    check(c.rows() == a.rows() && c.cols() == b.rows(), "ref_gemm_nt: bad output shape");
    const std::size_t k = a.cols(), n = b.rows();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* ai = a.data() + i * k;
        double* ci = c.data() + i * n;
        for (std::size_t j = 0; j < n; ++j) {
            const double* bj = b.data() + j * k;
            double s = 0.0;
            for (std::size_t p = 0; p < k; ++p) s += ai[p] * bj[p];
            ci[j] = s;
        }
    }
}

void ref_gemm_nn(const Matrix& a, const Matrix& b, Matrix& c) {
    check(a.cols() == b.rows(), "ref_gemm_nn: inner dimensions differ");
    check(c.rows() == a.rows() && c.cols() == b.cols(), "ref_gemm_nn: bad output shape");
    const std::size_t k = a.cols(), n = b.cols();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* ai = a.data() + i * k;
        double* ci = c.data() + i * n;
        for (std::size_t j = 0; j < n; ++j) ci[j] = 0.0;
        // Same zero-skip as the parallel kernel so contributions agree term by term.
        for (std::size_t p = 0; p < k; ++p) {
            const double apv = ai[p];
            if (apv == 0.0) continue;
            const double* bp = b.data() + p * n;
            for (std::size_t j = 0; j < n; ++j) ci[j] += apv * bp[j];
        }
    }
}

void ref_gemm_tn(const Matrix& a, const Matrix& b, Matrix& c) {
    check(a.rows() == b.rows(), "ref_gemm_tn: outer dimensions differ");
    check(c.rows() == a.cols() && c.cols() == b.cols(), "ref_gemm_tn: bad output shape");
    const std::size_t m = a.rows(), n = b.cols(), ka = a.cols();
    for (std::size_t i = 0; i < ka; ++i) {
        double* ci = c.data() + i * n;
        for (std::size_t j = 0; j < n; ++j) ci[j] = 0.0;
        for (std::size_t r = 0; r < m; ++r) {
            const double arv = a.data()[r * ka + i];
            if (arv == 0.0) continue;
            const double* br = b.data() + r * n;
            for (std::size_t j = 0; j < n; ++j) ci[j] += arv * br[j];
        }
    }
}

std::vector<Neighbor> ref_knn_topk(const Matrix& train, MetricKind metric,
                                   std::span<const double> query, std::size_t k) {
    check(k >= 1 && k <= train.rows(), "ref_knn_topk: k out of range");
    const MetricFn fn = metric_function(metric);
    std::vector<Neighbor> all(train.rows());
    for (std::size_t i = 0; i < train.rows(); ++i) {
        all[i].index = i;
        all[i].distance = fn(train.data() + i * train.cols(), query.data(), train.cols());
    }
    std::sort(all.begin(), all.end(), [](const Neighbor& x, const Neighbor& y) {
        if (x.distance != y.distance) return x.distance < y.distance;
        return x.index < y.index;
    });
    all.resize(k);
    return all;
}

Matrix ref_transform_batch(const RepresentationConfig& cfg, const Dataset& d,
                           std::span<const std::size_t> indices) {
    Matrix out(indices.size(), kGatewayCount);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const std::array<double, kGatewayCount> row = transform(cfg, d.records[indices[i]]);
        std::copy(row.begin(), row.end(), out.data() + i * kGatewayCount);
    }
    return out;
}

std::vector<double> ref_haversine_errors(std::span<const LatLon> predicted,
                                         std::span<const LatLon> actual) {
    check(predicted.size() == actual.size(), "ref_haversine_errors: length mismatch");
    std::vector<double> out(predicted.size());
    for (std::size_t i = 0; i < predicted.size(); ++i)
        out[i] = haversine_m(predicted[i], actual[i]);
    return out;
}

}  // namespace lorafp
