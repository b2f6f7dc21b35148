#include "dansr/gemm.hpp"

#include <algorithm>
#include <cassert>
#include <cstring>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>
#define DANSR_GEMM_AVX2 1
#endif

namespace dansr::gemm {

namespace {

int g_threads = 0;

constexpr int MR = 6;
constexpr int NR = 16;

inline float load_a(const float* a, int lda, bool trans, int i, int kk) {
  return trans ? a[static_cast<size_t>(kk) * lda + i] : a[static_cast<size_t>(i) * lda + kk];
}

inline float load_b(const float* b, int ldb, bool trans, int kk, int j) {
  return trans ? b[static_cast<size_t>(j) * ldb + kk] : b[static_cast<size_t>(kk) * ldb + j];
}

// Pack an MR-row panel of op(A): pa[kk*MR + r] = A[i0+r][kk], zero-padded rows.
void pack_a_panel(const float* a, int lda, bool trans, int m, int k, int i0, float* pa) {
  const int rows = std::min(MR, m - i0);
  for (int kk = 0; kk < k; ++kk) {
    for (int r = 0; r < rows; ++r) pa[kk * MR + r] = load_a(a, lda, trans, i0 + r, kk);
    for (int r = rows; r < MR; ++r) pa[kk * MR + r] = 0.0f;
  }
}

// Pack an NR-column panel of op(B): pb[kk*NR + c] = B[kk][j0+c], zero-padded cols.
void pack_b_panel(const float* b, int ldb, bool trans, int n, int k, int j0, float* pb) {
  const int cols = std::min(NR, n - j0);
  if (!trans && cols == NR) {
    for (int kk = 0; kk < k; ++kk)
      std::memcpy(pb + static_cast<size_t>(kk) * NR, b + static_cast<size_t>(kk) * ldb + j0,
                  NR * sizeof(float));
    return;
  }
  for (int kk = 0; kk < k; ++kk) {
    for (int c = 0; c < cols; ++c) pb[kk * NR + c] = load_b(b, ldb, trans, kk, j0 + c);
    for (int c = cols; c < NR; ++c) pb[kk * NR + c] = 0.0f;
  }
}

#ifdef DANSR_GEMM_AVX2

// 6x16 register tile: 12 accumulators, 2 B vectors, 1 A broadcast.
void kernel_6x16(int k, float alpha, const float* pa, const float* pb, float* acc /*6*16*/) {
  __m256 c00 = _mm256_setzero_ps(), c01 = _mm256_setzero_ps();
  __m256 c10 = _mm256_setzero_ps(), c11 = _mm256_setzero_ps();
  __m256 c20 = _mm256_setzero_ps(), c21 = _mm256_setzero_ps();
  __m256 c30 = _mm256_setzero_ps(), c31 = _mm256_setzero_ps();
  __m256 c40 = _mm256_setzero_ps(), c41 = _mm256_setzero_ps();
  __m256 c50 = _mm256_setzero_ps(), c51 = _mm256_setzero_ps();
  for (int kk = 0; kk < k; ++kk) {
    const __m256 b0 = _mm256_loadu_ps(pb);
    const __m256 b1 = _mm256_loadu_ps(pb + 8);
    __m256 a;
    a = _mm256_broadcast_ss(pa + 0);
    c00 = _mm256_fmadd_ps(a, b0, c00);
    c01 = _mm256_fmadd_ps(a, b1, c01);
    a = _mm256_broadcast_ss(pa + 1);
    c10 = _mm256_fmadd_ps(a, b0, c10);
    c11 = _mm256_fmadd_ps(a, b1, c11);
    a = _mm256_broadcast_ss(pa + 2);
    c20 = _mm256_fmadd_ps(a, b0, c20);
    c21 = _mm256_fmadd_ps(a, b1, c21);
    a = _mm256_broadcast_ss(pa + 3);
    c30 = _mm256_fmadd_ps(a, b0, c30);
    c31 = _mm256_fmadd_ps(a, b1, c31);
    a = _mm256_broadcast_ss(pa + 4);
    c40 = _mm256_fmadd_ps(a, b0, c40);
    c41 = _mm256_fmadd_ps(a, b1, c41);
    a = _mm256_broadcast_ss(pa + 5);
    c50 = _mm256_fmadd_ps(a, b0, c50);
    c51 = _mm256_fmadd_ps(a, b1, c51);
    pa += MR;
    pb += NR;
  }
  const __m256 va = _mm256_set1_ps(alpha);
  _mm256_storeu_ps(acc + 0, _mm256_mul_ps(c00, va));
  _mm256_storeu_ps(acc + 8, _mm256_mul_ps(c01, va));
  _mm256_storeu_ps(acc + 16, _mm256_mul_ps(c10, va));
  _mm256_storeu_ps(acc + 24, _mm256_mul_ps(c11, va));
  _mm256_storeu_ps(acc + 32, _mm256_mul_ps(c20, va));
  _mm256_storeu_ps(acc + 40, _mm256_mul_ps(c21, va));
  _mm256_storeu_ps(acc + 48, _mm256_mul_ps(c30, va));
  _mm256_storeu_ps(acc + 56, _mm256_mul_ps(c31, va));
  _mm256_storeu_ps(acc + 64, _mm256_mul_ps(c40, va));
  _mm256_storeu_ps(acc + 72, _mm256_mul_ps(c41, va));
  _mm256_storeu_ps(acc + 80, _mm256_mul_ps(c50, va));
  _mm256_storeu_ps(acc + 88, _mm256_mul_ps(c51, va));
}

#else

void kernel_6x16(int k, float alpha, const float* pa, const float* pb, float* acc) {
  float sums[MR * NR] = {};
  for (int kk = 0; kk < k; ++kk) {
    for (int r = 0; r < MR; ++r) {
      const float a = pa[kk * MR + r];
      for (int c = 0; c < NR; ++c) sums[r * NR + c] += a * pb[kk * NR + c];
    }
  }
  for (int i = 0; i < MR * NR; ++i) acc[i] = alpha * sums[i];
}

#endif

}  // namespace

void set_threads(int n) { g_threads = std::max(0, n); }

int threads() {
#ifdef _OPENMP
  return g_threads > 0 ? g_threads : omp_get_max_threads();
#else
  return 1;
#endif
}

void sgemm(bool trans_a, bool trans_b, int m, int n, int k, float alpha, const float* a, int lda,
           const float* b, int ldb, float beta, float* c, int ldc) {
  assert(beta == 0.0f || beta == 1.0f);
  if (m <= 0 || n <= 0) return;
  if (k <= 0) {
    if (beta == 0.0f)
      for (int i = 0; i < m; ++i) std::memset(c + static_cast<size_t>(i) * ldc, 0, n * sizeof(float));
    return;
  }

  const int m_panels = (m + MR - 1) / MR;
  std::vector<float> packed_a(static_cast<size_t>(m_panels) * MR * k);
  for (int p = 0; p < m_panels; ++p)
    pack_a_panel(a, lda, trans_a, m, k, p * MR, packed_a.data() + static_cast<size_t>(p) * MR * k);

  const int n_panels = (n + NR - 1) / NR;
  const bool parallel = static_cast<long long>(m) * n * k >= (1 << 18) && threads() > 1;

#ifdef _OPENMP
#pragma omp parallel num_threads(threads()) if (parallel)
#endif
  {
    std::vector<float> packed_b(static_cast<size_t>(NR) * k);
    alignas(32) float acc[MR * NR];
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
    for (int q = 0; q < n_panels; ++q) {
      const int j0 = q * NR;
      const int cols = std::min(NR, n - j0);
      pack_b_panel(b, ldb, trans_b, n, k, j0, packed_b.data());
      for (int p = 0; p < m_panels; ++p) {
        const int i0 = p * MR;
        const int rows = std::min(MR, m - i0);
        kernel_6x16(k, alpha, packed_a.data() + static_cast<size_t>(p) * MR * k, packed_b.data(), acc);
        for (int r = 0; r < rows; ++r) {
          float* crow = c + static_cast<size_t>(i0 + r) * ldc + j0;
          const float* arow = acc + r * NR;
          if (beta == 0.0f)
            for (int cc = 0; cc < cols; ++cc) crow[cc] = arow[cc];
          else
            for (int cc = 0; cc < cols; ++cc) crow[cc] += arow[cc];
        }
      }
    }
  }
}

void dgemm(bool trans_a, bool trans_b, int m, int n, int k, double alpha, const double* a, int lda,
           const double* b, int ldb, double beta, double* c, int ldc) {
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int kk = 0; kk < k; ++kk) {
        const double av = trans_a ? a[static_cast<size_t>(kk) * lda + i] : a[static_cast<size_t>(i) * lda + kk];
        const double bv = trans_b ? b[static_cast<size_t>(j) * ldb + kk] : b[static_cast<size_t>(kk) * ldb + j];
        acc += av * bv;
      }
      double* cv = c + static_cast<size_t>(i) * ldc + j;
      *cv = alpha * acc + (beta == 0.0 ? 0.0 : *cv);
    }
}

}  // namespace dansr::gemm
