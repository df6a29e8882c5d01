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

// Dense tensors with reverse-mode differentiation.
//
// A Tensor is a cheap handle to a node in a dynamically built computation
// graph. Operations record their inputs when any input requires a gradient;
// Backward() walks the recorded graph in reverse topological order. Leaf
// gradients accumulate across Backward() calls until ZeroGrad().
//
// Only rank-1 and rank-2 tensors are supported. Every op checks its output
// for NaN/Inf and throws NumericError when one appears.

#ifndef FTQA_TENSOR_H_
#define FTQA_TENSOR_H_

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace ftqa::nn {

using Shape = std::vector<size_t>;

std::string ShapeString(const Shape &shape);
size_t ShapeSize(const Shape &shape);

struct Node;

class Tensor {
 public:
  Tensor() = default;

  static Tensor Zeros(Shape shape, bool requires_grad = false);
  static Tensor FromValues(Shape shape, std::vector<double> values,
                           bool requires_grad = false);
  static Tensor Scalar(double value);
  static Tensor Vector(std::vector<double> values);

  bool defined() const { return node_ != nullptr; }
  const Shape &shape() const;
  size_t size() const;
  size_t rank() const { return shape().size(); }

  std::span<const double> values() const;
  // Writable view of a leaf's values. Throws for op results.
  std::span<double> mutable_values();
  // Empty when no gradient has been accumulated.
  std::span<const double> grad() const;
  std::span<double> mutable_grad();

  double item() const;
  double at(size_t i) const { return values()[i]; }
  bool requires_grad() const;
  void ZeroGrad();

  Node *node() const { return node_.get(); }
  const std::shared_ptr<Node> &node_ptr() const { return node_; }

 private:
  explicit Tensor(std::shared_ptr<Node> node) : node_(std::move(node)) {}
  friend Tensor MakeTensor(std::shared_ptr<Node> node);

  std::shared_ptr<Node> node_;
};

// Computes gradients of a scalar loss with respect to every leaf that
// requires them. Throws ShapeError for non-scalar losses.
void Backward(const Tensor &loss);

// Disables graph recording on the current thread while alive.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard &) = delete;
  NoGradGuard &operator=(const NoGradGuard &) = delete;

 private:
  bool previous_;
};
bool GradEnabled();

// Matrix-vector product: W[m,n] x[n] -> [m].
Tensor MatVec(const Tensor &w, const Tensor &x);
// W x + b.
Tensor Affine(const Tensor &w, const Tensor &x, const Tensor &b);

Tensor Add(const Tensor &a, const Tensor &b);
Tensor Sub(const Tensor &a, const Tensor &b);
Tensor Mul(const Tensor &a, const Tensor &b);
// Elementwise sum of same-shape tensors. Requires at least one term.
Tensor AddN(std::span<const Tensor> terms);
// Elementwise mean of same-shape tensors. Requires at least one term.
Tensor Mean(std::span<const Tensor> terms);
// Scalar tensor times tensor.
Tensor Scale(const Tensor &scalar, const Tensor &x);
Tensor ScaleBy(const Tensor &x, double factor);

Tensor Relu(const Tensor &x);
Tensor Tanh(const Tensor &x);
Tensor Sigmoid(const Tensor &x);
Tensor Softmax(const Tensor &x);

// Concatenates rank-1 tensors.
Tensor Concat(std::span<const Tensor> parts);
Tensor Dot(const Tensor &a, const Tensor &b);
Tensor Sum(const Tensor &x);

// logits[u] = states[u] . query
Tensor AttentionLogits(std::span<const Tensor> states, const Tensor &query);
// sum_u weights[u] * states[u]
Tensor WeightedSum(const Tensor &weights, std::span<const Tensor> states);

// Row `index` of a rank-2 table, as a rank-1 tensor.
Tensor Row(const Tensor &table, size_t index);

// Numerically stable binary cross entropy on a scalar logit.
Tensor BceWithLogits(const Tensor &logit, double label);

// Low-level hook for fused ops defined outside tensor.cc. `backward` receives
// the output node and must add into the gradients of `inputs`.
using BackwardFn = std::function<void(Node &)>;
Tensor MakeOp(const char *op, Shape shape, std::vector<double> values,
              std::vector<Tensor> inputs, BackwardFn backward);
// Gradient buffer of an op input, allocated on first use. Null if the input
// does not require a gradient.
double *InputGrad(Node &out, size_t input);
std::span<const double> InputValues(const Node &out, size_t input);
std::span<const double> OutputGrad(const Node &out);

}  // namespace ftqa::nn

#endif  // FTQA_TENSOR_H_
