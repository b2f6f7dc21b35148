#pragma once

#include <cmath>
#include <cstring>
#include <type_traits>

#include "dansr/gemm.hpp"
#include "dansr/tensor.hpp"

namespace dansr::ad {

enum class PadMode { zero, reflect };

namespace detail {

template <typename T>
void gemm_t(bool ta, bool tb, int m, int n, int k, T alpha, const T* a, int lda, const T* b,
            int ldb, T beta, T* c, int ldc) {
  if constexpr (std::is_same_v<T, float>)
    gemm::sgemm(ta, tb, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
  else
    gemm::dgemm(ta, tb, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
}

inline int reflect101(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * n - 2;
  int m = i % period;
  if (m < 0) m += period;
  if (m >= n) m = period - m;
  return m;
}

template <typename T>
Var<T> make_op(Tensor<T> out, std::vector<Var<T>> parents) {
  auto n = std::make_shared<Node<T>>();
  n->val = std::move(out);
  n->parents = std::move(parents);
  for (const auto& p : n->parents) n->requires_grad |= p->requires_grad;
  return n;
}

// Padded copy of one NCHW sample plane set: (C, H+2p, W+2p).
template <typename T>
void pad_sample(const Tensor<T>& x, int n, int pad, PadMode mode, T* out) {
  const int C = x.shape.d[1], H = x.shape.d[2], W = x.shape.d[3];
  const int Hp = H + 2 * pad, Wp = W + 2 * pad;
  for (int c = 0; c < C; ++c) {
    const T* src = x.v.data() + (static_cast<size_t>(n) * C + c) * H * W;
    T* dst = out + static_cast<size_t>(c) * Hp * Wp;
    for (int y = 0; y < Hp; ++y) {
      const int sy = y - pad;
      if (mode == PadMode::zero && (sy < 0 || sy >= H)) {
        std::memset(dst + static_cast<size_t>(y) * Wp, 0, sizeof(T) * Wp);
        continue;
      }
      const int ry = mode == PadMode::zero ? sy : reflect101(sy, H);
      for (int xcol = 0; xcol < Wp; ++xcol) {
        const int sx = xcol - pad;
        if (mode == PadMode::zero && (sx < 0 || sx >= W)) {
          dst[static_cast<size_t>(y) * Wp + xcol] = T(0);
        } else {
          const int rx = mode == PadMode::zero ? sx : reflect101(sx, W);
          dst[static_cast<size_t>(y) * Wp + xcol] = src[static_cast<size_t>(ry) * W + rx];
        }
      }
    }
  }
}

// col[(c*k+ky)*k+kx][y*W+x] = padded(c, y+ky, x+kx); rows are contiguous
// strided copies from the padded plane.
template <typename T>
void im2col(const T* padded, int C, int H, int W, int k, T* col) {
  const int Hp = H + k - 1, Wp = W + k - 1;
  size_t row = 0;
  for (int c = 0; c < C; ++c)
    for (int ky = 0; ky < k; ++ky)
      for (int kx = 0; kx < k; ++kx, ++row) {
        T* dst = col + row * (static_cast<size_t>(H) * W);
        const T* base = padded + static_cast<size_t>(c) * Hp * Wp + static_cast<size_t>(ky) * Wp + kx;
        for (int y = 0; y < H; ++y)
          std::memcpy(dst + static_cast<size_t>(y) * W, base + static_cast<size_t>(y) * Wp,
                      sizeof(T) * W);
      }
}

}  // namespace detail

/// 2-D cross-correlation, stride 1, odd kernel, same-size output.
/// x: (N, Ci, H, W); w: (O, Ci, k, k); b: (O) as a (1, O) tensor.
template <typename T>
Var<T> conv2d(const Var<T>& x, const Var<T>& w, const Var<T>& b, PadMode pad_mode = PadMode::zero) {
  const auto& xs = x->val.shape;
  const auto& ws = w->val.shape;
  if (xs.ndim != 4 || ws.ndim != 4) throw std::invalid_argument("conv2d: need 4-D tensors");
  const int N = xs.d[0], Ci = xs.d[1], H = xs.d[2], W = xs.d[3];
  const int O = ws.d[0], k = ws.d[2];
  if (ws.d[1] != Ci) throw std::invalid_argument("conv2d: channel mismatch");
  if (ws.d[3] != k || k % 2 == 0) throw std::invalid_argument("conv2d: kernel must be square and odd");
  if (b->val.numel() != O) throw std::invalid_argument("conv2d: bias size mismatch");
  const int pad = k / 2;
  const int HW = H * W;
  const int KK = Ci * k * k;

  Tensor<T> out(Shape::nchw(N, O, H, W));
  {
    std::vector<T> padded(static_cast<size_t>(Ci) * (H + 2 * pad) * (W + 2 * pad));
    std::vector<T> col(static_cast<size_t>(KK) * HW);
    for (int n = 0; n < N; ++n) {
      detail::pad_sample(x->val, n, pad, pad_mode, padded.data());
      detail::im2col(padded.data(), Ci, H, W, k, col.data());
      T* on = out.v.data() + static_cast<size_t>(n) * O * HW;
      detail::gemm_t<T>(false, false, O, HW, KK, T(1), w->val.v.data(), KK, col.data(), HW, T(0), on,
                        HW);
      for (int o = 0; o < O; ++o) {
        const T bias = b->val.v[o];
        T* row = on + static_cast<size_t>(o) * HW;
        for (int i = 0; i < HW; ++i) row[i] += bias;
      }
    }
  }

  auto node = detail::make_op(std::move(out), {x, w, b});
  node->backfn = [xp = x.get(), wp = w.get(), bp = b.get(), node_p = node.get(), N, Ci, H, W, O, k,
                  pad, HW, KK, pad_mode]() {
    const T* gy = node_p->grad.data();
    std::vector<T> padded(static_cast<size_t>(Ci) * (H + 2 * pad) * (W + 2 * pad));
    std::vector<T> col(static_cast<size_t>(KK) * HW);
    std::vector<T> colg;
    if (xp->requires_grad) colg.resize(static_cast<size_t>(KK) * HW);
    const int Hp = H + 2 * pad, Wp = W + 2 * pad;

    for (int n = 0; n < N; ++n) {
      const T* gyn = gy + static_cast<size_t>(n) * O * HW;
      if (wp->requires_grad || xp->requires_grad) {
        detail::pad_sample(xp->val, n, pad, pad_mode, padded.data());
        detail::im2col(padded.data(), Ci, H, W, k, col.data());
      }
      if (wp->requires_grad) {
        // Wg(O, KK) += gy_n(O, HW) @ col^T(HW, KK)
        detail::gemm_t<T>(false, true, O, KK, HW, T(1), gyn, HW, col.data(), HW, T(1),
                          wp->grad.data(), KK);
      }
      if (bp->requires_grad) {
        for (int o = 0; o < O; ++o) {
          T acc(0);
          const T* row = gyn + static_cast<size_t>(o) * HW;
          for (int i = 0; i < HW; ++i) acc += row[i];
          bp->grad[o] += acc;
        }
      }
      if (xp->requires_grad) {
        // colg(KK, HW) = W^T(KK, O) @ gy_n(O, HW)
        detail::gemm_t<T>(true, false, KK, HW, O, T(1), wp->val.v.data(), KK, gyn, HW, T(0),
                          colg.data(), HW);
        // Gather col-grads onto the padded grid, then fold the padding.
        T* xg = xp->grad.data() + (static_cast<size_t>(n) * Ci) * H * W;
        for (int c = 0; c < Ci; ++c)
          for (int py = 0; py < Hp; ++py)
            for (int px = 0; px < Wp; ++px) {
              T acc(0);
              const int ky_lo = std::max(0, py - (H - 1)), ky_hi = std::min(k - 1, py);
              const int kx_lo = std::max(0, px - (W - 1)), kx_hi = std::min(k - 1, px);
              for (int ky = ky_lo; ky <= ky_hi; ++ky)
                for (int kx = kx_lo; kx <= kx_hi; ++kx) {
                  const size_t row = (static_cast<size_t>(c) * k + ky) * k + kx;
                  acc += colg[row * HW + static_cast<size_t>(py - ky) * W + (px - kx)];
                }
              if (acc == T(0)) continue;
              const int sy = py - pad, sx = px - pad;
              if (pad_mode == PadMode::zero) {
                if (sy < 0 || sy >= H || sx < 0 || sx >= W) continue;
                xg[static_cast<size_t>(c) * H * W + static_cast<size_t>(sy) * W + sx] += acc;
              } else {
                const int ry = detail::reflect101(sy, H), rx = detail::reflect101(sx, W);
                xg[static_cast<size_t>(c) * H * W + static_cast<size_t>(ry) * W + rx] += acc;
              }
            }
      }
    }
  };
  return node;
}

/// x: (N, F); w: (G, F); b: (G) as (1, G). Returns (N, G).
template <typename T>
Var<T> fully_connected(const Var<T>& x, const Var<T>& w, const Var<T>& b) {
  const auto& xs = x->val.shape;
  const auto& ws = w->val.shape;
  if (xs.ndim != 2 || ws.ndim != 2) throw std::invalid_argument("fully_connected: need 2-D tensors");
  const int N = xs.d[0], F = xs.d[1], G = ws.d[0];
  if (ws.d[1] != F || b->val.numel() != G)
    throw std::invalid_argument("fully_connected: shape mismatch");

  Tensor<T> out(Shape::mat(N, G));
  detail::gemm_t<T>(false, true, N, G, F, T(1), x->val.v.data(), F, w->val.v.data(), F, T(0),
                    out.v.data(), G);
  for (int n = 0; n < N; ++n)
    for (int g = 0; g < G; ++g) out.v[static_cast<size_t>(n) * G + g] += b->val.v[g];

  auto node = detail::make_op(std::move(out), {x, w, b});
  node->backfn = [xp = x.get(), wp = w.get(), bp = b.get(), node_p = node.get(), N, F, G]() {
    const T* gy = node_p->grad.data();
    if (xp->requires_grad)
      detail::gemm_t<T>(false, false, N, F, G, T(1), gy, G, wp->val.v.data(), F, T(1),
                        xp->grad.data(), F);
    if (wp->requires_grad)
      detail::gemm_t<T>(true, false, G, F, N, T(1), gy, G, xp->val.v.data(), F, T(1),
                        wp->grad.data(), F);
    if (bp->requires_grad)
      for (int n = 0; n < N; ++n)
        for (int g = 0; g < G; ++g) bp->grad[g] += gy[static_cast<size_t>(n) * G + g];
  };
  return node;
}

template <typename T>
Var<T> leaky_relu(const Var<T>& x, double slope) {
  Tensor<T> out(x->val.shape);
  for (size_t i = 0; i < out.v.size(); ++i) {
    const T v = x->val.v[i];
    out.v[i] = v > T(0) ? v : static_cast<T>(slope * v);
  }
  auto node = detail::make_op(std::move(out), {x});
  node->backfn = [xp = x.get(), node_p = node.get(), slope]() {
    if (!xp->requires_grad) return;
    for (size_t i = 0; i < node_p->grad.size(); ++i)
      xp->grad[i] += node_p->grad[i] * (xp->val.v[i] > T(0) ? T(1) : static_cast<T>(slope));
  };
  return node;
}

template <typename T>
Var<T> relu(const Var<T>& x) {
  return leaky_relu(x, 0.0);
}

template <typename T>
Var<T> add(const Var<T>& a, const Var<T>& b) {
  if (a->val.shape != b->val.shape) throw std::invalid_argument("add: shape mismatch");
  Tensor<T> out(a->val.shape);
  for (size_t i = 0; i < out.v.size(); ++i) out.v[i] = a->val.v[i] + b->val.v[i];
  auto node = detail::make_op(std::move(out), {a, b});
  node->backfn = [ap = a.get(), bp = b.get(), node_p = node.get()]() {
    if (ap->requires_grad)
      for (size_t i = 0; i < node_p->grad.size(); ++i) ap->grad[i] += node_p->grad[i];
    if (bp->requires_grad)
      for (size_t i = 0; i < node_p->grad.size(); ++i) bp->grad[i] += node_p->grad[i];
  };
  return node;
}

template <typename T>
Var<T> scale(const Var<T>& x, double c) {
  Tensor<T> out(x->val.shape);
  for (size_t i = 0; i < out.v.size(); ++i) out.v[i] = static_cast<T>(c) * x->val.v[i];
  auto node = detail::make_op(std::move(out), {x});
  node->backfn = [xp = x.get(), node_p = node.get(), c]() {
    if (!xp->requires_grad) return;
    for (size_t i = 0; i < node_p->grad.size(); ++i)
      xp->grad[i] += static_cast<T>(c) * node_p->grad[i];
  };
  return node;
}

template <typename T>
Var<T> concat_channels(const Var<T>& a, const Var<T>& b) {
  const auto& as = a->val.shape;
  const auto& bs = b->val.shape;
  if (as.ndim != 4 || bs.ndim != 4 || as.d[0] != bs.d[0] || as.d[2] != bs.d[2] || as.d[3] != bs.d[3])
    throw std::invalid_argument("concat_channels: incompatible shapes");
  const int N = as.d[0], Ca = as.d[1], Cb = bs.d[1], H = as.d[2], W = as.d[3];
  const size_t plane = static_cast<size_t>(H) * W;
  Tensor<T> out(Shape::nchw(N, Ca + Cb, H, W));
  for (int n = 0; n < N; ++n) {
    std::memcpy(out.v.data() + (static_cast<size_t>(n) * (Ca + Cb)) * plane,
                a->val.v.data() + (static_cast<size_t>(n) * Ca) * plane, sizeof(T) * Ca * plane);
    std::memcpy(out.v.data() + (static_cast<size_t>(n) * (Ca + Cb) + Ca) * plane,
                b->val.v.data() + (static_cast<size_t>(n) * Cb) * plane, sizeof(T) * Cb * plane);
  }
  auto node = detail::make_op(std::move(out), {a, b});
  node->backfn = [ap = a.get(), bp = b.get(), node_p = node.get(), N, Ca, Cb, plane]() {
    for (int n = 0; n < N; ++n) {
      if (ap->requires_grad) {
        const T* g = node_p->grad.data() + (static_cast<size_t>(n) * (Ca + Cb)) * plane;
        T* dst = ap->grad.data() + (static_cast<size_t>(n) * Ca) * plane;
        for (size_t i = 0; i < Ca * plane; ++i) dst[i] += g[i];
      }
      if (bp->requires_grad) {
        const T* g = node_p->grad.data() + (static_cast<size_t>(n) * (Ca + Cb) + Ca) * plane;
        T* dst = bp->grad.data() + (static_cast<size_t>(n) * Cb) * plane;
        for (size_t i = 0; i < Cb * plane; ++i) dst[i] += g[i];
      }
    }
  };
  return node;
}

/// (1, F) -> (n, F) by row copy; gradient sums the rows back.
template <typename T>
Var<T> broadcast_rows(const Var<T>& x, int n) {
  const auto& xs = x->val.shape;
  if (xs.ndim != 2 || xs.d[0] != 1) throw std::invalid_argument("broadcast_rows: need (1, F)");
  const int F = xs.d[1];
  Tensor<T> out(Shape::mat(n, F));
  for (int r = 0; r < n; ++r)
    std::memcpy(out.v.data() + static_cast<size_t>(r) * F, x->val.v.data(), sizeof(T) * F);
  auto node = detail::make_op(std::move(out), {x});
  node->backfn = [xp = x.get(), node_p = node.get(), n, F]() {
    if (!xp->requires_grad) return;
    for (int r = 0; r < n; ++r)
      for (int f = 0; f < F; ++f) xp->grad[f] += node_p->grad[static_cast<size_t>(r) * F + f];
  };
  return node;
}

/// (N, F) -> (N, F, H, W); every spatial site gets a copy of the vector.
template <typename T>
Var<T> broadcast_spatial(const Var<T>& x, int H, int W) {
  const auto& xs = x->val.shape;
  if (xs.ndim != 2) throw std::invalid_argument("broadcast_spatial: need (N, F)");
  const int N = xs.d[0], F = xs.d[1];
  Tensor<T> out(Shape::nchw(N, F, H, W));
  const size_t plane = static_cast<size_t>(H) * W;
  for (int n = 0; n < N; ++n)
    for (int f = 0; f < F; ++f) {
      const T v = x->val.v[static_cast<size_t>(n) * F + f];
      T* dst = out.v.data() + (static_cast<size_t>(n) * F + f) * plane;
      for (size_t i = 0; i < plane; ++i) dst[i] = v;
    }
  auto node = detail::make_op(std::move(out), {x});
  node->backfn = [xp = x.get(), node_p = node.get(), N, F, plane]() {
    if (!xp->requires_grad) return;
    for (int n = 0; n < N; ++n)
      for (int f = 0; f < F; ++f) {
        const T* g = node_p->grad.data() + (static_cast<size_t>(n) * F + f) * plane;
        T acc(0);
        for (size_t i = 0; i < plane; ++i) acc += g[i];
        xp->grad[static_cast<size_t>(n) * F + f] += acc;
      }
  };
  return node;
}

/// (N, C*r^2, H, W) -> (N, C, rH, rW); exact permutation.
template <typename T>
Var<T> pixel_shuffle(const Var<T>& x, int r) {
  const auto& xs = x->val.shape;
  if (xs.ndim != 4) throw std::invalid_argument("pixel_shuffle: need 4-D");
  const int N = xs.d[0], Cin = xs.d[1], H = xs.d[2], W = xs.d[3];
  if (r < 1 || Cin % (r * r) != 0) throw std::invalid_argument("pixel_shuffle: channels not divisible by r^2");
  const int C = Cin / (r * r);
  Tensor<T> out(Shape::nchw(N, C, H * r, W * r));
  const auto src_index = [=](int n, int c, int dy, int dx, int h, int w) {
    return ((static_cast<size_t>(n) * Cin + (c * r * r + dy * r + dx)) * H + h) * W + w;
  };
  size_t dst = 0;
  for (int n = 0; n < N; ++n)
    for (int c = 0; c < C; ++c)
      for (int y = 0; y < H * r; ++y)
        for (int x2 = 0; x2 < W * r; ++x2, ++dst)
          out.v[dst] = x->val.v[src_index(n, c, y % r, x2 % r, y / r, x2 / r)];
  auto node = detail::make_op(std::move(out), {x});
  node->backfn = [xp = x.get(), node_p = node.get(), N, C, Cin, H, W, r, src_index]() {
    if (!xp->requires_grad) return;
    size_t dst = 0;
    for (int n = 0; n < N; ++n)
      for (int c = 0; c < C; ++c)
        for (int y = 0; y < H * r; ++y)
          for (int x2 = 0; x2 < W * r; ++x2, ++dst)
            xp->grad[src_index(n, c, y % r, x2 % r, y / r, x2 / r)] += node_p->grad[dst];
  };
  return node;
}

/// Non-overlapping average pooling (kernel == stride).
template <typename T>
Var<T> avg_pool(const Var<T>& x, int k = 2, int stride = 2) {
  const auto& xs = x->val.shape;
  if (xs.ndim != 4) throw std::invalid_argument("avg_pool: need 4-D");
  if (k != stride) throw std::invalid_argument("avg_pool: kernel must equal stride");
  const int N = xs.d[0], C = xs.d[1], H = xs.d[2], W = xs.d[3];
  if (H % k != 0 || W % k != 0) throw std::invalid_argument("avg_pool: dims not divisible by kernel");
  const int Ho = H / k, Wo = W / k;
  Tensor<T> out(Shape::nchw(N, C, Ho, Wo));
  const T inv = T(1) / static_cast<T>(k * k);
  for (int nc = 0; nc < N * C; ++nc) {
    const T* src = x->val.v.data() + static_cast<size_t>(nc) * H * W;
    T* dst = out.v.data() + static_cast<size_t>(nc) * Ho * Wo;
    for (int y = 0; y < Ho; ++y)
      for (int xo = 0; xo < Wo; ++xo) {
        T acc(0);
        for (int i = 0; i < k; ++i)
          for (int j = 0; j < k; ++j) acc += src[static_cast<size_t>(y * k + i) * W + (xo * k + j)];
        dst[static_cast<size_t>(y) * Wo + xo] = acc * inv;
      }
  }
  auto node = detail::make_op(std::move(out), {x});
  node->backfn = [xp = x.get(), node_p = node.get(), N, C, H, W, Ho, Wo, k, inv]() {
    if (!xp->requires_grad) return;
    for (int nc = 0; nc < N * C; ++nc) {
      const T* g = node_p->grad.data() + static_cast<size_t>(nc) * Ho * Wo;
      T* dst = xp->grad.data() + static_cast<size_t>(nc) * H * W;
      for (int y = 0; y < Ho; ++y)
        for (int xo = 0; xo < Wo; ++xo) {
          const T gv = g[static_cast<size_t>(y) * Wo + xo] * inv;
          for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) dst[static_cast<size_t>(y * k + i) * W + (xo * k + j)] += gv;
        }
    }
  };
  return node;
}

/// (N, C, H, W) -> (N, C): spatial mean.
template <typename T>
Var<T> global_avg_pool(const Var<T>& x) {
  const auto& xs = x->val.shape;
  if (xs.ndim != 4) throw std::invalid_argument("global_avg_pool: need 4-D");
  const int N = xs.d[0], C = xs.d[1];
  const size_t plane = static_cast<size_t>(xs.d[2]) * xs.d[3];
  Tensor<T> out(Shape::mat(N, C));
  for (int nc = 0; nc < N * C; ++nc) {
    const T* src = x->val.v.data() + static_cast<size_t>(nc) * plane;
    T acc(0);
    for (size_t i = 0; i < plane; ++i) acc += src[i];
    out.v[nc] = acc / static_cast<T>(plane);
  }
  auto node = detail::make_op(std::move(out), {x});
  node->backfn = [xp = x.get(), node_p = node.get(), N, C, plane]() {
    if (!xp->requires_grad) return;
    for (int nc = 0; nc < N * C; ++nc) {
      const T gv = node_p->grad[nc] / static_cast<T>(plane);
      T* dst = xp->grad.data() + static_cast<size_t>(nc) * plane;
      for (size_t i = 0; i < plane; ++i) dst[i] += gv;
    }
  };
  return node;
}

/// Mean absolute error; the subgradient at zero is zero.
template <typename T>
Var<T> l1_loss(const Var<T>& pred, const Var<T>& target) {
  if (pred->val.shape != target->val.shape) throw std::invalid_argument("l1_loss: shape mismatch");
  const size_t n = pred->val.v.size();
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) acc += std::fabs(static_cast<double>(pred->val.v[i]) - target->val.v[i]);
  auto node = detail::make_op(Tensor<T>::scalar(static_cast<T>(acc / n)), {pred, target});
  node->backfn = [pp = pred.get(), tp = target.get(), node_p = node.get(), n]() {
    const T g = node_p->grad[0] / static_cast<T>(n);
    for (size_t i = 0; i < n; ++i) {
      const T d = pp->val.v[i] - tp->val.v[i];
      const T s = d > T(0) ? g : (d < T(0) ? -g : T(0));
      if (pp->requires_grad) pp->grad[i] += s;
      if (tp->requires_grad) tp->grad[i] -= s;
    }
  };
  return node;
}

/// Mean squared error.
template <typename T>
Var<T> l2_loss(const Var<T>& pred, const Var<T>& target) {
  if (pred->val.shape != target->val.shape) throw std::invalid_argument("l2_loss: shape mismatch");
  const size_t n = pred->val.v.size();
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(pred->val.v[i]) - target->val.v[i];
    acc += d * d;
  }
  auto node = detail::make_op(Tensor<T>::scalar(static_cast<T>(acc / n)), {pred, target});
  node->backfn = [pp = pred.get(), tp = target.get(), node_p = node.get(), n]() {
    const T g = node_p->grad[0] * T(2) / static_cast<T>(n);
    for (size_t i = 0; i < n; ++i) {
      const T d = (pp->val.v[i] - tp->val.v[i]) * g;
      if (pp->requires_grad) pp->grad[i] += d;
      if (tp->requires_grad) tp->grad[i] -= d;
    }
  };
  return node;
}

/// x + conv(act(conv(x))): the EDSR-style block; weights shared by the
/// caller, no normalization layers.
template <typename T>
Var<T> residual_block(const Var<T>& x, const Var<T>& w1, const Var<T>& b1, const Var<T>& w2,
                      const Var<T>& b2, double act_slope = 0.0) {
  auto h = conv2d(x, w1, b1);
  h = leaky_relu(h, act_slope);
  h = conv2d(h, w2, b2);
  return add(x, h);
}

}  // namespace dansr::ad
