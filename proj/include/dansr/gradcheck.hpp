#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "dansr/rng.hpp"
#include "dansr/tensor.hpp"

namespace dansr::ad {

/// Builds a scalar-valued graph from f64 leaves.
using GradCheckFn = std::function<Var<double>(const std::vector<Var<double>>&)>;

/// Central-difference verification of the reverse-mode gradients at f64.
/// Coordinates are sampled (seeded) when an input exceeds
/// max_coords_per_input. Returns the worst relative error
/// |analytic - numeric| / max(1, |analytic| + |numeric|).
inline double grad_check(const GradCheckFn& fn, const std::vector<Tensor<double>>& inputs,
                         double eps = 1e-4, int max_coords_per_input = 64,
                         std::uint64_t seed = 0x5eed) {
  std::vector<Var<double>> leaves;
  leaves.reserve(inputs.size());
  for (const auto& t : inputs) leaves.push_back(leaf(t, /*requires_grad=*/true));
  auto root = fn(leaves);
  if (root->val.numel() != 1) throw std::invalid_argument("grad_check: fn must return a scalar");
  backward(root);

  const auto eval = [&](const std::vector<Tensor<double>>& ins) {
    std::vector<Var<double>> ls;
    ls.reserve(ins.size());
    for (const auto& t : ins) ls.push_back(leaf(t, false));
    return fn(ls)->val.v[0];
  };

  Rng rng(seed);
  double worst = 0.0;
  for (size_t i = 0; i < inputs.size(); ++i) {
    const int n = inputs[i].numel();
    std::vector<int> coords;
    if (n <= max_coords_per_input) {
      coords.resize(n);
      for (int c = 0; c < n; ++c) coords[c] = c;
    } else {
      for (int c = 0; c < max_coords_per_input; ++c) coords.push_back(rng.uniform_int(0, n - 1));
    }
    for (int c : coords) {
      auto plus = inputs;
      auto minus = inputs;
      plus[i].v[c] += eps;
      minus[i].v[c] -= eps;
      const double numeric = (eval(plus) - eval(minus)) / (2.0 * eps);
      const double analytic = leaves[i]->grad[c];
      const double rel =
          std::fabs(analytic - numeric) / std::max(1.0, std::fabs(analytic) + std::fabs(numeric));
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

inline Tensor<double> random_tensor(Shape s, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Tensor<double> t(s);
  for (auto& x : t.v) x = rng.uniform(lo, hi);
  return t;
}

}  // namespace dansr::ad
