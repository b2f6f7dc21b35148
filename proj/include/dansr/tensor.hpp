#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dansr/rng.hpp"

namespace dansr::ad {

/// Up to 4-D shapes; ndim 0 is a scalar, 2-D is (N, F), 4-D is (N, C, H, W).
struct Shape {
  std::array<int, 4> d{1, 1, 1, 1};
  int ndim = 0;

  static Shape scalar() { return {}; }
  static Shape mat(int n, int f) { return {{n, f, 1, 1}, 2}; }
  static Shape nchw(int n, int c, int h, int w) { return {{n, c, h, w}, 4}; }

  int numel() const {
    int p = 1;
    for (int i = 0; i < ndim; ++i) p *= d[i];
    return p;
  }
  bool operator==(const Shape& o) const { return ndim == o.ndim && d == o.d; }
  bool operator!=(const Shape& o) const { return !(*this == o); }
};

template <typename T>
struct Tensor {
  Shape shape;
  std::vector<T> v;

  Tensor() = default;
  explicit Tensor(Shape s) : shape(s), v(static_cast<size_t>(s.numel()), T(0)) {}
  Tensor(Shape s, T fill) : shape(s), v(static_cast<size_t>(s.numel()), fill) {}

  static Tensor scalar(T x) {
    Tensor t{Shape::scalar()};
    t.v[0] = x;
    return t;
  }

  int numel() const { return shape.numel(); }
};

template <typename T>
struct Node;

template <typename T>
using Var = std::shared_ptr<Node<T>>;

/// One vertex of the reverse-mode tape. backfn reads this node's grad and
/// accumulates into the parents' grads; it is only invoked when some
/// ancestor requires gradients.
template <typename T>
struct Node {
  Tensor<T> val;
  std::vector<T> grad;  // same numel as val once backward() touches the node
  bool requires_grad = false;
  std::vector<Var<T>> parents;
  std::function<void()> backfn;
  std::string name;
};

template <typename T>
Var<T> leaf(Tensor<T> t, bool requires_grad = false, std::string name = {}) {
  auto n = std::make_shared<Node<T>>();
  n->val = std::move(t);
  n->requires_grad = requires_grad;
  n->name = std::move(name);
  return n;
}

template <typename T>
Var<T> constant(Tensor<T> t) {
  return leaf(std::move(t), false);
}

/// Topological replay of the tape from root. Zeroes every reachable grad,
/// seeds the root with ones, then walks the reversed order.
template <typename T>
void backward(const Var<T>& root) {
  std::vector<Node<T>*> order;
  std::unordered_set<Node<T>*> visited;
  std::vector<std::pair<Node<T>*, size_t>> stack;
  stack.emplace_back(root.get(), 0);
  visited.insert(root.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node<T>* p = node->parents[next++].get();
      if (visited.insert(p).second) stack.emplace_back(p, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  for (auto* n : order) n->grad.assign(n->val.v.size(), T(0));
  std::fill(root->grad.begin(), root->grad.end(), T(1));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node<T>* n = *it;
    if (n->requires_grad && n->backfn) n->backfn();
  }
}

template <typename T>
double grad_l2_norm(const Var<T>& v) {
  double acc = 0.0;
  for (T g : v->grad) acc += static_cast<double>(g) * g;
  return std::sqrt(acc);
}

/// Ordered, uniquely named collection of learnable leaves.
template <typename T>
struct ParameterStoreT {
  struct Entry {
    std::string name;
    Var<T> var;
    bool trainable = true;
  };
  std::vector<Entry> entries;
  std::unordered_map<std::string, size_t> index;

  Var<T>& add(const std::string& name, Tensor<T> init, bool trainable = true) {
    if (index.count(name)) throw std::invalid_argument("duplicate parameter: " + name);
    index[name] = entries.size();
    entries.push_back({name, leaf(std::move(init), /*requires_grad=*/true, name), trainable});
    return entries.back().var;
  }

  bool has(const std::string& name) const { return index.count(name) != 0; }

  Var<T>& at(const std::string& name) {
    auto it = index.find(name);
    if (it == index.end()) throw std::out_of_range("no such parameter: " + name);
    return entries[it->second].var;
  }
  const Var<T>& at(const std::string& name) const {
    auto it = index.find(name);
    if (it == index.end()) throw std::out_of_range("no such parameter: " + name);
    return entries[it->second].var;
  }

  size_t scalar_count() const {
    size_t n = 0;
    for (const auto& e : entries) n += e.var->val.v.size();
    return n;
  }
};

using ParameterStore = ParameterStoreT<float>;

// Kaiming-uniform fan-in initialization.
template <typename T>
Tensor<T> kaiming_uniform(Shape shape, int fan_in, Rng& rng, double gain = 1.0) {
  Tensor<T> t(shape);
  const double bound = gain * std::sqrt(3.0 / std::max(1, fan_in));
  for (auto& x : t.v) x = static_cast<T>(rng.uniform(-bound, bound));
  return t;
}

}  // namespace dansr::ad
