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

// Named parameters, layers, optimizer, gradient checking and checkpoints
// built on the tensor kernel.

#ifndef FTQA_NN_H_
#define FTQA_NN_H_

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ftqa/random.h"
#include "ftqa/tensor.h"

namespace ftqa::nn {

struct Parameter {
  std::string name;
  Tensor tensor;
  bool trainable = true;
};

// Ordered collection of uniquely named parameters.
class ParameterSet {
 public:
  // Weight matrices get Glorot-uniform values, rank-1 tensors start at zero.
  Tensor Create(const std::string &name, Shape shape, Rng &rng);
  // Adds an existing tensor. Throws on duplicate names.
  Tensor Add(const std::string &name, Tensor tensor, bool trainable = true);

  const std::vector<Parameter> &params() const { return params_; }
  std::vector<Parameter> &params() { return params_; }
  const Parameter *Find(const std::string &name) const;
  Parameter *Find(const std::string &name);
  Tensor Get(const std::string &name) const;

  void ZeroGrad();
  double GradNorm() const;
  size_t ValueCount() const;

 private:
  std::vector<Parameter> params_;
  std::map<std::string, size_t> index_;
};

// Fills `t` uniformly in +-sqrt(6 / (fan_in + fan_out)).
void InitGlorot(Tensor &t, size_t fan_in, size_t fan_out, Rng &rng);

// One direction of a gated recurrent unit. Gates are stacked in the order
// update, reset, candidate: W [3h, d], U [3h, h], b [3h].
struct GruWeights {
  Tensor w;
  Tensor u;
  Tensor b;
  size_t hidden = 0;
};

GruWeights CreateGru(ParameterSet &params, const std::string &prefix,
                     size_t input_dim, size_t hidden, Rng &rng);

// One recurrence step:
//   z = sig(Wz x + Uz h + bz), r = sig(Wr x + Ur h + br)
//   n = tanh(Wn x + Un (r * h) + bn), h' = (1 - z) * n + z * h
Tensor GruStep(const GruWeights &gru, const Tensor &x, const Tensor &h);

// Bidirectional GRU over a non-empty sequence; each output position is the
// concatenation [forward_t; backward_t] of width 2h.
std::vector<Tensor> BiGruEncode(const GruWeights &forward, const GruWeights &backward,
                                std::span<const Tensor> inputs);

// Two affine maps around a ReLU: W2 relu(W1 x + b1) + b2.
struct FeedForward {
  Tensor w1, b1, w2, b2;
  Tensor operator()(const Tensor &x) const;
};

FeedForward CreateFeedForward(ParameterSet &params, const std::string &prefix,
                              size_t input_dim, size_t hidden_dim, size_t output_dim,
                              Rng &rng);

// ReLU hidden layers followed by a linear map to one output.
struct Mlp {
  std::vector<Tensor> weights;
  std::vector<Tensor> biases;
  Tensor operator()(const Tensor &x) const;
};

Mlp CreateMlp(ParameterSet &params, const std::string &prefix, size_t input_dim,
              const std::vector<size_t> &hidden_dims, Rng &rng);

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // Global gradient-norm clip; <= 0 disables clipping.
  double clip_norm = 5.0;
};

class Adam {
 public:
  explicit Adam(AdamConfig config = {}) : config_(config) {}

  // Applies one update from the accumulated gradients of trainable
  // parameters, scaled by `grad_scale` before clipping. Returns the
  // pre-clip gradient norm.
  double Step(ParameterSet &params, double grad_scale = 1.0);
  long steps() const { return step_; }

 private:
  AdamConfig config_;
  long step_ = 0;
  std::map<std::string, std::vector<double>> m_, v_;
};

struct GradCheckEntry {
  std::string name;
  double max_relative_error = 0.0;
  size_t checked = 0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double max_relative_error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

// Compares analytic gradients of `loss_fn` against central differences for
// every value of every listed parameter. The relative error of one value is
// |analytic - numeric| / max(|analytic|, |numeric|, 1e-6).
GradCheckReport GradCheck(const std::function<Tensor()> &loss_fn,
                          std::vector<Parameter> params, double epsilon,
                          double tolerance);

// Checkpoint layout (all integers little-endian):
//   magic "FTQACKPT", u32 version, u32 metadata length, metadata bytes,
//   u32 parameter count, then per parameter: u32 name length, name,
//   u32 rank, u64 dims[rank]; then the raw f64 payload of every parameter
//   in table order.
inline constexpr uint32_t kCheckpointVersion = 1;

void SaveCheckpoint(const std::string &path, const ParameterSet &params,
                    const std::string &metadata);
// Loads values into `params`; every stored name must exist with the same
// shape and every parameter must be present in the file.
std::string LoadCheckpoint(const std::string &path, ParameterSet &params);
std::string ReadCheckpointMetadata(const std::string &path);

}  // namespace ftqa::nn

#endif  // FTQA_NN_H_
