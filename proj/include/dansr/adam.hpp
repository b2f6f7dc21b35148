#pragma once

#include <cmath>
#include <unordered_map>
#include <vector>

#include "dansr/tensor.hpp"

namespace dansr::ad {

struct AdamConfig {
  double lr = 2e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

template <typename T>
struct AdamStateT {
  struct Moments {
    std::vector<T> m, v;
  };
  std::unordered_map<std::string, Moments> moments;
  long long step = 0;
};

using AdamState = AdamStateT<float>;

/// Bias-corrected Adam over every trainable entry of the store, consuming
/// the gradients left by the last backward().
template <typename T>
void adam_step(ParameterStoreT<T>& store, AdamStateT<T>& state, const AdamConfig& cfg) {
  state.step += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (auto& e : store.entries) {
    if (!e.trainable) continue;
    auto& node = *e.var;
    if (node.grad.size() != node.val.v.size()) continue;  // untouched by the last graph
    auto& mom = state.moments[e.name];
    if (mom.m.size() != node.val.v.size()) {
      mom.m.assign(node.val.v.size(), T(0));
      mom.v.assign(node.val.v.size(), T(0));
    }
    for (size_t i = 0; i < node.val.v.size(); ++i) {
      const double g = node.grad[i];
      const double m = cfg.beta1 * mom.m[i] + (1.0 - cfg.beta1) * g;
      const double v = cfg.beta2 * mom.v[i] + (1.0 - cfg.beta2) * g * g;
      mom.m[i] = static_cast<T>(m);
      mom.v[i] = static_cast<T>(v);
      node.val.v[i] -= static_cast<T>(cfg.lr * (m / bc1) / (std::sqrt(v / bc2) + cfg.eps));
    }
  }
}

}  // namespace dansr::ad
