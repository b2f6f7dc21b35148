#pragma once

namespace dansr::gemm {

/// Row-major GEMM: C = alpha * op(A) @ op(B) + beta * C, with
/// op(X) = X or X^T. beta must be 0 or 1. Deterministic for a fixed
/// thread count and also across thread counts: the K loop is never
/// split, so every output element is one fixed-order dot product.
void sgemm(bool trans_a, bool trans_b, int m, int n, int k, float alpha, const float* a, int lda,
           const float* b, int ldb, float beta, float* c, int ldc);

/// Double-precision path, plain blocked loops; used by the f64
/// verification graphs where clarity beats speed.
void dgemm(bool trans_a, bool trans_b, int m, int n, int k, double alpha, const double* a, int lda,
           const double* b, int ldb, double beta, double* c, int ldc);

void set_threads(int n);  // clamps to >= 1; 0 keeps the runtime default
int threads();

}  // namespace dansr::gemm
