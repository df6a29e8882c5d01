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

#include "ftqa/nn.h"

#include <algorithm>
#include <cmath>

#include "ftqa/binary_io.h"
#include "ftqa/error.h"

namespace ftqa::nn {

namespace {

double Sig(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Tensor ParameterSet::Create(const std::string &name, Shape shape, Rng &rng) {
  Tensor t = Tensor::Zeros(shape, true);
  if (shape.size() == 2) InitGlorot(t, shape[1], shape[0], rng);
  return Add(name, t);
}

Tensor ParameterSet::Add(const std::string &name, Tensor tensor, bool trainable) {
  if (index_.count(name)) throw Error("duplicate parameter name: " + name);
  index_[name] = params_.size();
  params_.push_back({name, tensor, trainable});
  return tensor;
}

const Parameter *ParameterSet::Find(const std::string &name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : &params_[it->second];
}

Parameter *ParameterSet::Find(const std::string &name) {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : &params_[it->second];
}

Tensor ParameterSet::Get(const std::string &name) const {
  const Parameter *p = Find(name);
  if (!p) throw Error("unknown parameter: " + name);
  return p->tensor;
}

void ParameterSet::ZeroGrad() {
  for (Parameter &p : params_) p.tensor.ZeroGrad();
}

double ParameterSet::GradNorm() const {
  double total = 0.0;
  for (const Parameter &p : params_) {
    if (!p.trainable) continue;
    for (double g : p.tensor.grad()) total += g * g;
  }
  return std::sqrt(total);
}

size_t ParameterSet::ValueCount() const {
  size_t n = 0;
  for (const Parameter &p : params_) n += p.tensor.size();
  return n;
}

void InitGlorot(Tensor &t, size_t fan_in, size_t fan_out, Rng &rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double &v : t.mutable_values()) v = rng.Uniform(-limit, limit);
}

GruWeights CreateGru(ParameterSet &params, const std::string &prefix,
                     size_t input_dim, size_t hidden, Rng &rng) {
  GruWeights g;
  g.hidden = hidden;
  g.w = params.Add(prefix + ".W", Tensor::Zeros({3 * hidden, input_dim}, true));
  g.u = params.Add(prefix + ".U", Tensor::Zeros({3 * hidden, hidden}, true));
  g.b = params.Add(prefix + ".b", Tensor::Zeros({3 * hidden}, true));
  // Glorot per gate block.
  InitGlorot(g.w, input_dim, hidden, rng);
  InitGlorot(g.u, hidden, hidden, rng);
  return g;
}

Tensor GruStep(const GruWeights &gru, const Tensor &x, const Tensor &h) {
  const size_t H = gru.hidden;
  const size_t D = x.size();
  if (gru.w.shape() != Shape{3 * H, D} || h.size() != H) {
    throw ShapeError("GruStep: shape mismatch " + ShapeString(gru.w.shape()) +
                     " vs " + ShapeString(x.shape()) + " / " +
                     ShapeString(h.shape()));
  }
  auto W = gru.w.values();
  auto U = gru.u.values();
  auto b = gru.b.values();
  auto xv = x.values();
  auto hv = h.values();

  // Cache layout: z[H], r[H], n[H], rh[H].
  std::vector<double> cache(4 * H);
  double *z = cache.data(), *r = z + H, *n = r + H, *rh = n + H;
  for (size_t i = 0; i < 2 * H; ++i) {
    double acc = b[i];
    const double *wr = W.data() + i * D;
    for (size_t j = 0; j < D; ++j) acc += wr[j] * xv[j];
    const double *ur = U.data() + i * H;
    for (size_t j = 0; j < H; ++j) acc += ur[j] * hv[j];
    z[i] = Sig(acc);  // writes z then r, which are contiguous
  }
  for (size_t i = 0; i < H; ++i) rh[i] = r[i] * hv[i];
  std::vector<double> out(H);
  for (size_t i = 0; i < H; ++i) {
    const size_t row = 2 * H + i;
    double acc = b[row];
    const double *wr = W.data() + row * D;
    for (size_t j = 0; j < D; ++j) acc += wr[j] * xv[j];
    const double *ur = U.data() + row * H;
    for (size_t j = 0; j < H; ++j) acc += ur[j] * rh[j];
    n[i] = std::tanh(acc);
    out[i] = (1.0 - z[i]) * n[i] + z[i] * hv[i];
  }

  return MakeOp("GruStep", {H}, std::move(out), {gru.w, gru.u, gru.b, x, h},
                [H, D, cache = std::move(cache)](Node &node) {
                  auto g = OutputGrad(node);
                  auto W = InputValues(node, 0);
                  auto U = InputValues(node, 1);
                  auto xv = InputValues(node, 3);
                  auto hv = InputValues(node, 4);
                  const double *z = cache.data(), *r = z + H, *n = r + H, *rh = n + H;
                  double *gW = InputGrad(node, 0);
                  double *gU = InputGrad(node, 1);
                  double *gb = InputGrad(node, 2);
                  double *gx = InputGrad(node, 3);
                  double *gh = InputGrad(node, 4);

                  // Pre-activation gradients for the three gate blocks.
                  std::vector<double> da(3 * H);
                  std::vector<double> dh(H, 0.0);
                  for (size_t i = 0; i < H; ++i) {
                    const double dz = g[i] * (hv[i] - n[i]);
                    const double dn = g[i] * (1.0 - z[i]);
                    dh[i] += g[i] * z[i];
                    da[i] = dz * z[i] * (1.0 - z[i]);
                    da[2 * H + i] = dn * (1.0 - n[i] * n[i]);
                  }
                  // Through Un (r * h).
                  std::vector<double> drh(H, 0.0);
                  for (size_t i = 0; i < H; ++i) {
                    const double a = da[2 * H + i];
                    const double *ur = U.data() + (2 * H + i) * H;
                    for (size_t j = 0; j < H; ++j) drh[j] += ur[j] * a;
                    if (gU) {
                      double *gur = gU + (2 * H + i) * H;
                      for (size_t j = 0; j < H; ++j) gur[j] += a * rh[j];
                    }
                  }
                  for (size_t i = 0; i < H; ++i) {
                    dh[i] += drh[i] * r[i];
                    da[H + i] = drh[i] * hv[i] * r[i] * (1.0 - r[i]);
                  }
                  // Update and reset gates read h directly.
                  for (size_t i = 0; i < 2 * H; ++i) {
                    const double a = da[i];
                    const double *ur = U.data() + i * H;
                    for (size_t j = 0; j < H; ++j) dh[j] += ur[j] * a;
                    if (gU) {
                      double *gur = gU + i * H;
                      for (size_t j = 0; j < H; ++j) gur[j] += a * hv[j];
                    }
                  }
                  for (size_t i = 0; i < 3 * H; ++i) {
                    const double a = da[i];
                    if (gb) gb[i] += a;
                    const double *wr = W.data() + i * D;
                    if (gx) {
                      for (size_t j = 0; j < D; ++j) gx[j] += wr[j] * a;
                    }
                    if (gW) {
                      double *gwr = gW + i * D;
                      for (size_t j = 0; j < D; ++j) gwr[j] += a * xv[j];
                    }
                  }
                  if (gh) {
                    for (size_t i = 0; i < H; ++i) gh[i] += dh[i];
                  }
                });
}

std::vector<Tensor> BiGruEncode(const GruWeights &forward, const GruWeights &backward,
                                std::span<const Tensor> inputs) {
  if (inputs.empty()) throw ShapeError("BiGruEncode: empty sequence");
  const size_t T = inputs.size();
  std::vector<Tensor> fwd(T), bwd(T);
  Tensor h = Tensor::Zeros({forward.hidden});
  for (size_t t = 0; t < T; ++t) {
    h = GruStep(forward, inputs[t], h);
    fwd[t] = h;
  }
  h = Tensor::Zeros({backward.hidden});
  for (size_t t = T; t-- > 0;) {
    h = GruStep(backward, inputs[t], h);
    bwd[t] = h;
  }
  std::vector<Tensor> out(T);
  for (size_t t = 0; t < T; ++t) {
    const Tensor parts[] = {fwd[t], bwd[t]};
    out[t] = Concat(parts);
  }
  return out;
}

Tensor FeedForward::operator()(const Tensor &x) const {
  return Affine(w2, Relu(Affine(w1, x, b1)), b2);
}

FeedForward CreateFeedForward(ParameterSet &params, const std::string &prefix,
                              size_t input_dim, size_t hidden_dim, size_t output_dim,
                              Rng &rng) {
  FeedForward f;
  f.w1 = params.Create(prefix + ".W1", {hidden_dim, input_dim}, rng);
  f.b1 = params.Create(prefix + ".b1", {hidden_dim}, rng);
  f.w2 = params.Create(prefix + ".W2", {output_dim, hidden_dim}, rng);
  f.b2 = params.Create(prefix + ".b2", {output_dim}, rng);
  return f;
}

Tensor Mlp::operator()(const Tensor &x) const {
  Tensor h = x;
  for (size_t i = 0; i < weights.size(); ++i) {
    h = Affine(weights[i], h, biases[i]);
    if (i + 1 < weights.size()) h = Relu(h);
  }
  return h;
}

Mlp CreateMlp(ParameterSet &params, const std::string &prefix, size_t input_dim,
              const std::vector<size_t> &hidden_dims, Rng &rng) {
  Mlp m;
  size_t in = input_dim;
  std::vector<size_t> dims = hidden_dims;
  dims.push_back(1);
  for (size_t i = 0; i < dims.size(); ++i) {
    const std::string p = prefix + "." + std::to_string(i);
    m.weights.push_back(params.Create(p + ".W", {dims[i], in}, rng));
    m.biases.push_back(params.Create(p + ".b", {dims[i]}, rng));
    in = dims[i];
  }
  return m;
}

double Adam::Step(ParameterSet &params, double grad_scale) {
  double norm_sq = 0.0;
  for (const Parameter &p : params.params()) {
    if (!p.trainable) continue;
    for (double g : p.tensor.grad()) norm_sq += (g * grad_scale) * (g * grad_scale);
  }
  const double norm = std::sqrt(norm_sq);
  double scale = grad_scale;
  if (config_.clip_norm > 0 && norm > config_.clip_norm) {
    scale *= config_.clip_norm / norm;
  }
  ++step_;
  const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(step_));
  for (Parameter &p : params.params()) {
    if (!p.trainable) continue;
    auto grad = p.tensor.grad();
    if (grad.empty()) continue;
    auto values = p.tensor.mutable_values();
    auto &m = m_[p.name];
    auto &v = v_[p.name];
    if (m.empty()) {
      m.assign(values.size(), 0.0);
      v.assign(values.size(), 0.0);
    }
    for (size_t i = 0; i < values.size(); ++i) {
      const double g = grad[i] * scale;
      m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g;
      v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g * g;
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      values[i] -= config_.learning_rate * mhat / (std::sqrt(vhat) + config_.epsilon);
    }
  }
  return norm;
}

GradCheckReport GradCheck(const std::function<Tensor()> &loss_fn,
                          std::vector<Parameter> params, double epsilon,
                          double tolerance) {
  if (!(epsilon > 0)) throw Error("GradCheck: epsilon must be positive");
  GradCheckReport report;
  report.tolerance = tolerance;

  for (Parameter &p : params) p.tensor.ZeroGrad();
  Backward(loss_fn());
  std::vector<std::vector<double>> analytic;
  for (Parameter &p : params) {
    auto g = p.tensor.grad();
    std::vector<double> copy(g.begin(), g.end());
    copy.resize(p.tensor.size(), 0.0);
    analytic.push_back(std::move(copy));
  }

  NoGradGuard no_grad;
  for (size_t k = 0; k < params.size(); ++k) {
    GradCheckEntry entry;
    entry.name = params[k].name;
    auto values = params[k].tensor.mutable_values();
    for (size_t i = 0; i < values.size(); ++i) {
      const double original = values[i];
      values[i] = original + epsilon;
      const double plus = loss_fn().item();
      values[i] = original - epsilon;
      const double minus = loss_fn().item();
      values[i] = original;
      const double numeric = (plus - minus) / (2.0 * epsilon);
      const double a = analytic[k][i];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-6});
      entry.max_relative_error = std::max(entry.max_relative_error, std::abs(a - numeric) / denom);
      ++entry.checked;
    }
    report.max_relative_error = std::max(report.max_relative_error, entry.max_relative_error);
    report.entries.push_back(std::move(entry));
  }
  report.passed = report.max_relative_error < tolerance;
  return report;
}

namespace {
constexpr const char kCheckpointMagic[] = "FTQACKPT";
}

void SaveCheckpoint(const std::string &path, const ParameterSet &params,
                    const std::string &metadata) {
  BinaryWriter w;
  w.Magic(kCheckpointMagic);
  w.U32(kCheckpointVersion);
  w.String(metadata);
  w.U32(static_cast<uint32_t>(params.params().size()));
  for (const Parameter &p : params.params()) {
    w.String(p.name);
    w.U32(static_cast<uint32_t>(p.tensor.rank()));
    for (size_t d : p.tensor.shape()) w.U64(d);
  }
  for (const Parameter &p : params.params()) {
    for (double v : p.tensor.values()) w.F64(v);
  }
  w.WriteFile(path);
}

namespace {

struct TableEntry {
  std::string name;
  Shape shape;
};

std::vector<TableEntry> ReadHeader(BinaryReader &r, std::string &metadata) {
  r.ExpectMagic(kCheckpointMagic);
  r.ExpectVersion(kCheckpointVersion);
  metadata = r.String();
  const uint32_t count = r.U32();
  std::vector<TableEntry> table(count);
  for (TableEntry &e : table) {
    e.name = r.String();
    const uint32_t rank = r.U32();
    if (rank == 0 || rank > 2) throw FormatError("checkpoint: bad rank for " + e.name);
    for (uint32_t i = 0; i < rank; ++i) e.shape.push_back(r.U64());
  }
  return table;
}

}  // namespace

std::string LoadCheckpoint(const std::string &path, ParameterSet &params) {
  BinaryReader r = BinaryReader::FromFile(path);
  std::string metadata;
  std::vector<TableEntry> table = ReadHeader(r, metadata);
  if (table.size() != params.params().size()) {
    throw FormatError("checkpoint " + path + ": holds " + std::to_string(table.size()) +
                      " parameters, model has " + std::to_string(params.params().size()));
  }
  std::vector<Parameter *> targets;
  for (const TableEntry &e : table) {
    Parameter *p = params.Find(e.name);
    if (!p) throw FormatError("checkpoint " + path + ": unknown parameter " + e.name);
    if (p->tensor.shape() != e.shape) {
      throw ShapeError("checkpoint " + path + ": parameter " + e.name + " has shape " +
                       ShapeString(e.shape) + ", model expects " +
                       ShapeString(p->tensor.shape()));
    }
    targets.push_back(p);
  }
  for (Parameter *p : targets) {
    for (double &v : p->tensor.mutable_values()) v = r.F64();
  }
  r.ExpectEnd();
  return metadata;
}

std::string ReadCheckpointMetadata(const std::string &path) {
  BinaryReader r = BinaryReader::FromFile(path);
  std::string metadata;
  ReadHeader(r, metadata);
  return metadata;
}

}  // namespace ftqa::nn
