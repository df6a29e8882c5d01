// Copyright 2026 The ftqa Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ftqa/tensor.h"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "ftqa/error.h"

namespace ftqa::nn {

struct Node {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;
  std::vector<std::shared_ptr<Node>> inputs;
  BackwardFn backward;
  bool requires_grad = false;
  bool leaf = true;
};

namespace {

thread_local bool grad_enabled = true;

void CheckFinite(const char *op, const std::vector<double> &values) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw NumericError(std::string("non-finite value produced by ") + op);
    }
  }
}

void RequireSameShape(const char *op, const Tensor &a, const Tensor &b) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " +
                     ShapeString(a.shape()) + " vs " + ShapeString(b.shape()));
  }
}

void RequireRank(const char *op, const Tensor &t, size_t rank) {
  if (!t.defined()) throw ShapeError(std::string(op) + ": undefined tensor");
  if (t.rank() != rank) {
    throw ShapeError(std::string(op) + ": expected rank " +
                     std::to_string(rank) + ", got " + ShapeString(t.shape()));
  }
}

void RequireScalar(const char *op, const Tensor &t) {
  if (t.size() != 1) {
    throw ShapeError(std::string(op) + ": expected a scalar, got " +
                     ShapeString(t.shape()));
  }
}

double SigmoidValue(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Tensor MakeTensor(std::shared_ptr<Node> node) { return Tensor(std::move(node)); }

std::string ShapeString(const Shape &shape) {
  std::string s = "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

size_t ShapeSize(const Shape &shape) {
  size_t n = 1;
  for (size_t d : shape) n *= d;
  return n;
}

Tensor Tensor::Zeros(Shape shape, bool requires_grad) {
  std::vector<double> values(ShapeSize(shape), 0.0);
  return FromValues(std::move(shape), std::move(values), requires_grad);
}

Tensor Tensor::FromValues(Shape shape, std::vector<double> values,
                          bool requires_grad) {
  if (shape.empty() || shape.size() > 2) {
    throw ShapeError("tensors must have rank 1 or 2, got " + ShapeString(shape));
  }
  if (ShapeSize(shape) != values.size()) {
    throw ShapeError("value count " + std::to_string(values.size()) +
                     " does not match shape " + ShapeString(shape));
  }
  CheckFinite("FromValues", values);
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->value = std::move(values);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

Tensor Tensor::Scalar(double value) { return FromValues({1}, {value}); }

Tensor Tensor::Vector(std::vector<double> values) {
  Shape shape{values.size()};
  return FromValues(std::move(shape), std::move(values));
}

const Shape &Tensor::shape() const { return node_->shape; }
size_t Tensor::size() const { return node_->value.size(); }
std::span<const double> Tensor::values() const { return node_->value; }

std::span<double> Tensor::mutable_values() {
  if (!node_->leaf) throw Error("cannot mutate the values of an op result");
  return node_->value;
}

std::span<const double> Tensor::grad() const { return node_->grad; }

std::span<double> Tensor::mutable_grad() {
  if (node_->grad.size() != node_->value.size()) {
    node_->grad.assign(node_->value.size(), 0.0);
  }
  return node_->grad;
}

double Tensor::item() const {
  RequireScalar("item", *this);
  return node_->value[0];
}

bool Tensor::requires_grad() const { return node_->requires_grad; }

void Tensor::ZeroGrad() { std::fill(node_->grad.begin(), node_->grad.end(), 0.0); }

NoGradGuard::NoGradGuard() : previous_(grad_enabled) { grad_enabled = false; }
NoGradGuard::~NoGradGuard() { grad_enabled = previous_; }
bool GradEnabled() { return grad_enabled; }

Tensor MakeOp(const char *op, Shape shape, std::vector<double> values,
              std::vector<Tensor> inputs, BackwardFn backward) {
  CheckFinite(op, values);
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->value = std::move(values);
  node->leaf = false;
  if (grad_enabled) {
    bool any = false;
    for (const Tensor &t : inputs) any = any || t.requires_grad();
    if (any) {
      node->requires_grad = true;
      node->inputs.reserve(inputs.size());
      for (const Tensor &t : inputs) node->inputs.push_back(t.node_ptr());
      node->backward = std::move(backward);
    }
  }
  return MakeTensor(std::move(node));
}

double *InputGrad(Node &out, size_t input) {
  Node &in = *out.inputs[input];
  if (!in.requires_grad) return nullptr;
  if (in.grad.size() != in.value.size()) in.grad.assign(in.value.size(), 0.0);
  return in.grad.data();
}

std::span<const double> InputValues(const Node &out, size_t input) {
  return out.inputs[input]->value;
}

std::span<const double> OutputGrad(const Node &out) { return out.grad; }

void Backward(const Tensor &loss) {
  RequireScalar("Backward", loss);
  Node *root = loss.node();
  if (!root->requires_grad) return;

  // Iterative post-order DFS gives a topological order.
  std::vector<Node *> order;
  std::unordered_set<Node *> visited;
  std::vector<std::pair<Node *, size_t>> stack;
  stack.emplace_back(root, 0);
  visited.insert(root);
  while (!stack.empty()) {
    auto &[node, next] = stack.back();
    if (next < node->inputs.size()) {
      Node *child = node->inputs[next++].get();
      if (child->requires_grad && !visited.count(child)) {
        visited.insert(child);
        stack.emplace_back(child, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  for (Node *node : order) {
    if (!node->leaf) node->grad.assign(node->value.size(), 0.0);
  }
  if (root->leaf) {
    if (root->grad.empty()) root->grad.assign(1, 0.0);
  }
  root->grad[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node *node = *it;
    if (!node->leaf && node->backward) node->backward(*node);
  }
}

Tensor MatVec(const Tensor &w, const Tensor &x) {
  RequireRank("MatVec", w, 2);
  RequireRank("MatVec", x, 1);
  const size_t m = w.shape()[0], n = w.shape()[1];
  if (x.size() != n) {
    throw ShapeError("MatVec: shape mismatch " + ShapeString(w.shape()) +
                     " vs " + ShapeString(x.shape()));
  }
  auto wv = w.values();
  auto xv = x.values();
  std::vector<double> y(m, 0.0);
  for (size_t i = 0; i < m; ++i) {
    const double *row = wv.data() + i * n;
    double acc = 0.0;
    for (size_t j = 0; j < n; ++j) acc += row[j] * xv[j];
    y[i] = acc;
  }
  return MakeOp("MatVec", {m}, std::move(y), {w, x}, [m, n](Node &out) {
    auto g = OutputGrad(out);
    auto wv = InputValues(out, 0);
    auto xv = InputValues(out, 1);
    if (double *gw = InputGrad(out, 0)) {
      for (size_t i = 0; i < m; ++i) {
        double *row = gw + i * n;
        for (size_t j = 0; j < n; ++j) row[j] += g[i] * xv[j];
      }
    }
    if (double *gx = InputGrad(out, 1)) {
      for (size_t i = 0; i < m; ++i) {
        const double *row = wv.data() + i * n;
        for (size_t j = 0; j < n; ++j) gx[j] += g[i] * row[j];
      }
    }
  });
}

Tensor Affine(const Tensor &w, const Tensor &x, const Tensor &b) {
  RequireRank("Affine", w, 2);
  RequireRank("Affine", x, 1);
  RequireRank("Affine", b, 1);
  const size_t m = w.shape()[0], n = w.shape()[1];
  if (x.size() != n || b.size() != m) {
    throw ShapeError("Affine: shape mismatch " + ShapeString(w.shape()) +
                     " vs " + ShapeString(x.shape()) + " + " +
                     ShapeString(b.shape()));
  }
  auto wv = w.values();
  auto xv = x.values();
  auto bv = b.values();
  std::vector<double> y(m, 0.0);
  for (size_t i = 0; i < m; ++i) {
    const double *row = wv.data() + i * n;
    double acc = bv[i];
    for (size_t j = 0; j < n; ++j) acc += row[j] * xv[j];
    y[i] = acc;
  }
  return MakeOp("Affine", {m}, std::move(y), {w, x, b}, [m, n](Node &out) {
    auto g = OutputGrad(out);
    auto wv = InputValues(out, 0);
    auto xv = InputValues(out, 1);
    if (double *gw = InputGrad(out, 0)) {
      for (size_t i = 0; i < m; ++i) {
        double *row = gw + i * n;
        for (size_t j = 0; j < n; ++j) row[j] += g[i] * xv[j];
      }
    }
    if (double *gx = InputGrad(out, 1)) {
      for (size_t i = 0; i < m; ++i) {
        const double *row = wv.data() + i * n;
        for (size_t j = 0; j < n; ++j) gx[j] += g[i] * row[j];
      }
    }
    if (double *gb = InputGrad(out, 2)) {
      for (size_t i = 0; i < m; ++i) gb[i] += g[i];
    }
  });
}

Tensor Add(const Tensor &a, const Tensor &b) {
  RequireSameShape("Add", a, b);
  std::vector<double> y(a.size());
  for (size_t i = 0; i < y.size(); ++i) y[i] = a.at(i) + b.at(i);
  return MakeOp("Add", a.shape(), std::move(y), {a, b}, [](Node &out) {
    auto g = OutputGrad(out);
    for (size_t k = 0; k < 2; ++k) {
      if (double *gi = InputGrad(out, k)) {
        for (size_t i = 0; i < g.size(); ++i) gi[i] += g[i];
      }
    }
  });
}

Tensor Sub(const Tensor &a, const Tensor &b) {
  RequireSameShape("Sub", a, b);
  std::vector<double> y(a.size());
  for (size_t i = 0; i < y.size(); ++i) y[i] = a.at(i) - b.at(i);
  return MakeOp("Sub", a.shape(), std::move(y), {a, b}, [](Node &out) {
    auto g = OutputGrad(out);
    if (double *ga = InputGrad(out, 0)) {
      for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    }
    if (double *gb = InputGrad(out, 1)) {
      for (size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
    }
  });
}

Tensor Mul(const Tensor &a, const Tensor &b) {
  RequireSameShape("Mul", a, b);
  std::vector<double> y(a.size());
  for (size_t i = 0; i < y.size(); ++i) y[i] = a.at(i) * b.at(i);
  return MakeOp("Mul", a.shape(), std::move(y), {a, b}, [](Node &out) {
    auto g = OutputGrad(out);
    auto av = InputValues(out, 0);
    auto bv = InputValues(out, 1);
    if (double *ga = InputGrad(out, 0)) {
      for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bv[i];
    }
    if (double *gb = InputGrad(out, 1)) {
      for (size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * av[i];
    }
  });
}

namespace {

Tensor ScaledSum(const char *op, std::span<const Tensor> terms, double factor) {
  if (terms.empty()) throw ShapeError(std::string(op) + ": no terms");
  for (const Tensor &t : terms) RequireSameShape(op, terms[0], t);
  std::vector<double> y(terms[0].size(), 0.0);
  for (const Tensor &t : terms) {
    auto v = t.values();
    for (size_t i = 0; i < y.size(); ++i) y[i] += v[i];
  }
  for (double &v : y) v *= factor;
  std::vector<Tensor> inputs(terms.begin(), terms.end());
  return MakeOp(op, terms[0].shape(), std::move(y), std::move(inputs),
                [factor](Node &out) {
                  auto g = OutputGrad(out);
                  for (size_t k = 0; k < out.inputs.size(); ++k) {
                    if (double *gi = InputGrad(out, k)) {
                      for (size_t i = 0; i < g.size(); ++i) gi[i] += factor * g[i];
                    }
                  }
                });
}

}  // namespace

Tensor AddN(std::span<const Tensor> terms) { return ScaledSum("AddN", terms, 1.0); }

Tensor Mean(std::span<const Tensor> terms) {
  return ScaledSum("Mean", terms, 1.0 / static_cast<double>(std::max<size_t>(terms.size(), 1)));
}

Tensor Scale(const Tensor &scalar, const Tensor &x) {
  RequireScalar("Scale", scalar);
  const double s = scalar.item();
  std::vector<double> y(x.size());
  for (size_t i = 0; i < y.size(); ++i) y[i] = s * x.at(i);
  return MakeOp("Scale", x.shape(), std::move(y), {scalar, x}, [](Node &out) {
    auto g = OutputGrad(out);
    const double s = InputValues(out, 0)[0];
    auto xv = InputValues(out, 1);
    if (double *gs = InputGrad(out, 0)) {
      double acc = 0.0;
      for (size_t i = 0; i < g.size(); ++i) acc += g[i] * xv[i];
      gs[0] += acc;
    }
    if (double *gx = InputGrad(out, 1)) {
      for (size_t i = 0; i < g.size(); ++i) gx[i] += s * g[i];
    }
  });
}

Tensor ScaleBy(const Tensor &x, double factor) {
  std::vector<double> y(x.size());
  for (size_t i = 0; i < y.size(); ++i) y[i] = factor * x.at(i);
  return MakeOp("ScaleBy", x.shape(), std::move(y), {x}, [factor](Node &out) {
    auto g = OutputGrad(out);
    if (double *gx = InputGrad(out, 0)) {
      for (size_t i = 0; i < g.size(); ++i) gx[i] += factor * g[i];
    }
  });
}

Tensor Relu(const Tensor &x) {
  std::vector<double> y(x.size());
  for (size_t i = 0; i < y.size(); ++i) y[i] = x.at(i) > 0 ? x.at(i) : 0.0;
  return MakeOp("Relu", x.shape(), std::move(y), {x}, [](Node &out) {
    auto g = OutputGrad(out);
    auto xv = InputValues(out, 0);
    if (double *gx = InputGrad(out, 0)) {
      for (size_t i = 0; i < g.size(); ++i) {
        if (xv[i] > 0) gx[i] += g[i];
      }
    }
  });
}

Tensor Tanh(const Tensor &x) {
  std::vector<double> y(x.size());
  for (size_t i = 0; i < y.size(); ++i) y[i] = std::tanh(x.at(i));
  return MakeOp("Tanh", x.shape(), std::move(y), {x}, [](Node &out) {
    auto g = OutputGrad(out);
    if (double *gx = InputGrad(out, 0)) {
      for (size_t i = 0; i < g.size(); ++i) {
        gx[i] += g[i] * (1.0 - out.value[i] * out.value[i]);
      }
    }
  });
}

Tensor Sigmoid(const Tensor &x) {
  std::vector<double> y(x.size());
  for (size_t i = 0; i < y.size(); ++i) y[i] = SigmoidValue(x.at(i));
  return MakeOp("Sigmoid", x.shape(), std::move(y), {x}, [](Node &out) {
    auto g = OutputGrad(out);
    if (double *gx = InputGrad(out, 0)) {
      for (size_t i = 0; i < g.size(); ++i) {
        gx[i] += g[i] * out.value[i] * (1.0 - out.value[i]);
      }
    }
  });
}

Tensor Softmax(const Tensor &x) {
  RequireRank("Softmax", x, 1);
  if (x.size() == 0) throw ShapeError("Softmax: empty input");
  auto xv = x.values();
  const double max = *std::max_element(xv.begin(), xv.end());
  std::vector<double> y(x.size());
  double total = 0.0;
  for (size_t i = 0; i < y.size(); ++i) {
    y[i] = std::exp(xv[i] - max);
    total += y[i];
  }
  for (double &v : y) v /= total;
  return MakeOp("Softmax", x.shape(), std::move(y), {x}, [](Node &out) {
    auto g = OutputGrad(out);
    if (double *gx = InputGrad(out, 0)) {
      double inner = 0.0;
      for (size_t i = 0; i < g.size(); ++i) inner += g[i] * out.value[i];
      for (size_t i = 0; i < g.size(); ++i) {
        gx[i] += out.value[i] * (g[i] - inner);
      }
    }
  });
}

Tensor Concat(std::span<const Tensor> parts) {
  if (parts.empty()) throw ShapeError("Concat: no parts");
  std::vector<double> y;
  for (const Tensor &p : parts) {
    RequireRank("Concat", p, 1);
    auto v = p.values();
    y.insert(y.end(), v.begin(), v.end());
  }
  const size_t total = y.size();
  std::vector<Tensor> inputs(parts.begin(), parts.end());
  return MakeOp("Concat", {total}, std::move(y), std::move(inputs), [](Node &out) {
    auto g = OutputGrad(out);
    size_t offset = 0;
    for (size_t k = 0; k < out.inputs.size(); ++k) {
      const size_t n = out.inputs[k]->value.size();
      if (double *gi = InputGrad(out, k)) {
        for (size_t i = 0; i < n; ++i) gi[i] += g[offset + i];
      }
      offset += n;
    }
  });
}

Tensor Dot(const Tensor &a, const Tensor &b) {
  RequireSameShape("Dot", a, b);
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) acc += a.at(i) * b.at(i);
  return MakeOp("Dot", {1}, {acc}, {a, b}, [](Node &out) {
    const double g = OutputGrad(out)[0];
    auto av = InputValues(out, 0);
    auto bv = InputValues(out, 1);
    if (double *ga = InputGrad(out, 0)) {
      for (size_t i = 0; i < av.size(); ++i) ga[i] += g * bv[i];
    }
    if (double *gb = InputGrad(out, 1)) {
      for (size_t i = 0; i < bv.size(); ++i) gb[i] += g * av[i];
    }
  });
}

Tensor Sum(const Tensor &x) {
  double acc = 0.0;
  for (double v : x.values()) acc += v;
  return MakeOp("Sum", {1}, {acc}, {x}, [](Node &out) {
    const double g = OutputGrad(out)[0];
    if (double *gx = InputGrad(out, 0)) {
      const size_t n = out.inputs[0]->value.size();
      for (size_t i = 0; i < n; ++i) gx[i] += g;
    }
  });
}

Tensor AttentionLogits(std::span<const Tensor> states, const Tensor &query) {
  if (states.empty()) throw ShapeError("AttentionLogits: no states");
  RequireRank("AttentionLogits", query, 1);
  std::vector<double> y(states.size());
  auto q = query.values();
  for (size_t u = 0; u < states.size(); ++u) {
    RequireSameShape("AttentionLogits", states[u], query);
    auto s = states[u].values();
    double acc = 0.0;
    for (size_t i = 0; i < q.size(); ++i) acc += s[i] * q[i];
    y[u] = acc;
  }
  std::vector<Tensor> inputs(states.begin(), states.end());
  inputs.push_back(query);
  const size_t n = states.size();
  return MakeOp("AttentionLogits", {n}, std::move(y), std::move(inputs),
                [n](Node &out) {
                  auto g = OutputGrad(out);
                  auto q = InputValues(out, n);
                  double *gq = InputGrad(out, n);
                  for (size_t u = 0; u < n; ++u) {
                    auto s = InputValues(out, u);
                    if (double *gs = InputGrad(out, u)) {
                      for (size_t i = 0; i < q.size(); ++i) gs[i] += g[u] * q[i];
                    }
                    if (gq) {
                      for (size_t i = 0; i < q.size(); ++i) gq[i] += g[u] * s[i];
                    }
                  }
                });
}

Tensor WeightedSum(const Tensor &weights, std::span<const Tensor> states) {
  RequireRank("WeightedSum", weights, 1);
  if (states.empty() || weights.size() != states.size()) {
    throw ShapeError("WeightedSum: " + std::to_string(weights.size()) +
                     " weights for " + std::to_string(states.size()) + " states");
  }
  const size_t d = states[0].size();
  std::vector<double> y(d, 0.0);
  for (size_t u = 0; u < states.size(); ++u) {
    RequireSameShape("WeightedSum", states[0], states[u]);
    auto s = states[u].values();
    const double w = weights.at(u);
    for (size_t i = 0; i < d; ++i) y[i] += w * s[i];
  }
  std::vector<Tensor> inputs{weights};
  inputs.insert(inputs.end(), states.begin(), states.end());
  return MakeOp("WeightedSum", states[0].shape(), std::move(y), std::move(inputs),
                [](Node &out) {
                  auto g = OutputGrad(out);
                  auto w = InputValues(out, 0);
                  double *gw = InputGrad(out, 0);
                  for (size_t u = 0; u < w.size(); ++u) {
                    auto s = InputValues(out, u + 1);
                    if (gw) {
                      double acc = 0.0;
                      for (size_t i = 0; i < g.size(); ++i) acc += g[i] * s[i];
                      gw[u] += acc;
                    }
                    if (double *gs = InputGrad(out, u + 1)) {
                      for (size_t i = 0; i < g.size(); ++i) gs[i] += w[u] * g[i];
                    }
                  }
                });
}

Tensor Row(const Tensor &table, size_t index) {
  RequireRank("Row", table, 2);
  const size_t rows = table.shape()[0], cols = table.shape()[1];
  if (index >= rows) {
    throw ShapeError("Row: index " + std::to_string(index) + " out of range for " +
                     ShapeString(table.shape()));
  }
  auto v = table.values();
  std::vector<double> y(v.begin() + index * cols, v.begin() + (index + 1) * cols);
  return MakeOp("Row", {cols}, std::move(y), {table}, [index, cols](Node &out) {
    auto g = OutputGrad(out);
    if (double *gt = InputGrad(out, 0)) {
      for (size_t i = 0; i < cols; ++i) gt[index * cols + i] += g[i];
    }
  });
}

Tensor BceWithLogits(const Tensor &logit, double label) {
  RequireScalar("BceWithLogits", logit);
  const double z = logit.item();
  const double loss = std::max(z, 0.0) - z * label + std::log1p(std::exp(-std::abs(z)));
  return MakeOp("BceWithLogits", {1}, {loss}, {logit}, [label](Node &out) {
    const double g = OutputGrad(out)[0];
    const double z = InputValues(out, 0)[0];
    if (double *gz = InputGrad(out, 0)) gz[0] += g * (SigmoidValue(z) - label);
  });
}

}  // namespace ftqa::nn
