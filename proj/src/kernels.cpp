#include "lorafp/kernels.hpp"

#include <stdexcept>

namespace lorafp {

namespace {

void check(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void gemm_nt(const Matrix& a, const Matrix& b, Matrix& c) {
    check(a.cols() == b.cols(), "gemm_nt: inner dimensions differ");
    check(c.rows() == a.rows() && c.cols() == b.rows(), "gemm_nt: bad output shape");
    const std::size_t k = a.cols(), n = b.rows();
    const auto m = static_cast<std::ptrdiff_t>(a.rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < m; ++i) {
        const double* ai = a.data() + static_cast<std::size_t>(i) * k;
        double* ci = c.data() + static_cast<std::size_t>(i) * n;
        for (std::size_t j = 0; j < n; ++j) {
            const double* bj = b.data() + j * k;
            double s = 0.0;
            for (std::size_t p = 0; p < k; ++p) s += ai[p] * bj[p];
            ci[j] = s;
        }
    }
}

void gemm_nn(const Matrix& a, const Matrix& b, Matrix& c) {
    check(a.cols() == b.rows(), "gemm_nn: inner dimensions differ");
    check(c.rows() == a.rows() && c.cols() == b.cols(), "gemm_nn: bad output shape");
    const std::size_t k = a.cols(), n = b.cols();
    const auto m = static_cast<std::ptrdiff_t>(a.rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < m; ++i) {
        const double* ai = a.data() + static_cast<std::size_t>(i) * k;
        double* ci = c.data() + static_cast<std::size_t>(i) * n;
        for (std::size_t j = 0; j < n; ++j) ci[j] = 0.0;
        for (std::size_t p = 0; p < k; ++p) {
            const double apv = ai[p];
            if (apv == 0.0) continue;
            const double* bp = b.data() + p * n;
            for (std::size_t j = 0; j < n; ++j) ci[j] += apv * bp[j];
        }
    }
}

void gemm_tn(const Matrix& a, const Matrix& b, Matrix& c) {
    check(a.rows() == b.rows(), "gemm_tn: outer dimensions differ");
    check(c.rows() == a.cols() && c.cols() == b.cols(), "gemm_tn: bad output shape");
    const std::size_t m = a.rows(), n = b.cols();
    const auto ka = static_cast<std::ptrdiff_t>(a.cols());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < ka; ++i) {
        double* ci = c.data() + static_cast<std::size_t>(i) * n;
        for (std::size_t j = 0; j < n; ++j) ci[j] = 0.0;
        for (std::size_t r = 0; r < m; ++r) {
            const double arv = a.data()[r * static_cast<std::size_t>(ka) + static_cast<std::size_t>(i)];
            if (arv == 0.0) continue;
            const double* br = b.data() + r * n;
            for (std::size_t j = 0; j < n; ++j) ci[j] += arv * br[j];
        }
    }
}

Matrix gemm_nt(const Matrix& a, const Matrix& b) {
    Matrix c(a.rows(), b.rows());
    gemm_nt(a, b, c);
    return c;
}

Matrix gemm_nn(const Matrix& a, const Matrix& b) {
    Matrix c(a.rows(), b.cols());
    gemm_nn(a, b, c);
    return c;
}

Matrix gemm_tn(const Matrix& a, const Matrix& b) {
    Matrix c(a.cols(), b.cols());
    gemm_tn(a, b, c);
    return c;
}

}  // namespace lorafp
