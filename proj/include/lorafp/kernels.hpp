#pragma once

#include "lorafp/matrix.hpp"

namespace lorafp {

// OpenMP matrix kernels. Each output element is accumulated by exactly one thread in a
// fixed index order, so results are bit-identical to the serial reference implementations
// in reference.hpp for every thread count.

// C[M x N] = A[M x K] * B[N x K]^T  (dot products of contiguous rows)
void gemm_nt(const Matrix& a, const Matrix& b, Matrix& c);

// C[M x N] = A[M x K] * B[K x N]   (row-wise axpy accumulation)
void gemm_nn(const Matrix& a, const Matrix& b, Matrix& c);

// C[K x N] = A[M x K]^T * B[M x N] (per output row, accumulate over A's rows)
void gemm_tn(const Matrix& a, const Matrix& b, Matrix& c);

// Allocating conveniences.
Matrix gemm_nt(const Matrix& a, const Matrix& b);
Matrix gemm_nn(const Matrix& a, const Matrix& b);
Matrix gemm_tn(const Matrix& a, const Matrix& b);

}  // namespace lorafp
