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

#include "ftqa/model.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ftqa/error.h"
#include "ftqa/parallel.h"
#include "ftqa/random.h"
#include "ftqa/text.h"

namespace ftqa {

using json = nlohmann::json;
using nn::Tensor;

namespace {

std::string CanonicalAblation(std::string_view name) {
  std::string s(name);
  std::replace(s.begin(), s.end(), '_', '-');
  return s;
}

double SigmoidOf(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

void EnableAblation(AblationFlags &flags, std::string_view name) {
  const std::string s = CanonicalAblation(name);
  if (s == "no-gloss") {
    flags.no_gloss = true;
  } else if (s == "no-edge-sentences") {
    flags.no_edge_sentences = true;
  } else if (s == "no-edge-importance") {
    flags.no_edge_importance = true;
  } else if (s == "no-self-attention") {
    flags.no_self_attention = true;
  } else if (s == "collapse-structure") {
    flags.collapse_structure = true;
  } else {
    throw Error("unknown ablation: " + std::string(name));
  }
}

std::vector<std::string> AblationNames(const AblationFlags &flags) {
  std::vector<std::string> out;
  if (flags.no_gloss) out.push_back("no-gloss");
  if (flags.no_edge_sentences) out.push_back("no-edge-sentences");
  if (flags.no_edge_importance) out.push_back("no-edge-importance");
  if (flags.no_self_attention) out.push_back("no-self-attention");
  if (flags.collapse_structure) out.push_back("collapse-structure");
  return out;
}

void ModelConfig::Validate() const {
  if (embed_dim == 0) throw Error("embed_dim must be positive");
  if (rnn_hidden == 0) throw Error("rnn_hidden must be positive");
  if (ffn_dim == 0) throw Error("ffn_dim must be positive");
  if (layers == 0) throw Error("layers must be at least 1");
  for (size_t d : mlp_dims) {
    if (d == 0) throw Error("mlp_dims entries must be positive");
  }
}

std::string ModelConfig::ToJson() const {
  json j{{"embed_dim", embed_dim},     {"rnn_hidden", rnn_hidden},
         {"ffn_dim", ffn_dim},         {"mlp_dims", mlp_dims},
         {"layers", layers},           {"embeddings_path", embeddings_path},
         {"ablate", AblationNames(ablation)}, {"seed", seed}};
  return j.dump();
}

ModelConfig ModelConfig::FromJson(const std::string &text) {
  try {
    const json j = json::parse(text);
    ModelConfig c;
    c.embed_dim = j.at("embed_dim").get<size_t>();
    c.rnn_hidden = j.at("rnn_hidden").get<size_t>();
    c.ffn_dim = j.at("ffn_dim").get<size_t>();
    c.mlp_dims = j.at("mlp_dims").get<std::vector<size_t>>();
    c.layers = j.at("layers").get<size_t>();
    c.embeddings_path = j.value("embeddings_path", "");
    for (const std::string &a : j.at("ablate").get<std::vector<std::string>>()) {
      EnableAblation(c.ablation, a);
    }
    c.seed = j.at("seed").get<uint64_t>();
    c.Validate();
    return c;
  } catch (const json::exception &e) {
    throw ParseError(std::string("model config: ") + e.what());
  }
}

std::vector<std::string> ModelTokens(std::string_view text) { return WordTokens(text); }

TokenVocabulary::TokenVocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.empty() || tokens_[0] != kUnknown) {
    throw FormatError("token vocabulary must start with the unknown token");
  }
  for (size_t i = 0; i < tokens_.size(); ++i) {
    if (!ids_.emplace(tokens_[i], i).second) {
      throw FormatError("duplicate vocabulary token: " + tokens_[i]);
    }
  }
}

TokenVocabulary TokenVocabulary::Build(const std::vector<GroundedGraph> &graphs) {
  std::vector<std::string> tokens{kUnknown};
  std::set<std::string> seen{kUnknown};
  auto add = [&](std::string_view text) {
    for (std::string &t : ModelTokens(text)) {
      if (seen.insert(t).second) tokens.push_back(std::move(t));
    }
  };
  for (const GroundedGraph &g : graphs) {
    add(g.question_text);
    for (const auto &[id, gloss] : g.glosses) add(gloss);
    for (const GroundedEdge &e : g.edges) {
      for (const EvidenceSentence &s : e.sentences) add(s.text);
    }
  }
  return TokenVocabulary(std::move(tokens));
}

size_t TokenVocabulary::Id(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? 0 : it->second;
}

std::string ForwardTrace::ToJson() const {
  json edges_json = json::array();
  for (size_t i = 0; i < edges.size(); ++i) {
    const EdgeTrace &e = edges[i];
    json entry{{"question_entity", e.question_entity},
               {"candidate", e.candidate},
               {"edge_scores", e.scores},
               {"best_sentence", e.best_sentence}};
    if (i < sentence_attention.size()) entry["sentence_attention"] = sentence_attention[i];
    edges_json.push_back(std::move(entry));
  }
  json candidates_json = json::array();
  for (size_t i = 0; i < candidates.size(); ++i) {
    candidates_json.push_back({{"entity_id", candidates[i]}, {"probability", probabilities[i]}});
  }
  json j{{"question_id", question_id},
         {"question_entities", question_entities},
         {"candidates", candidates_json},
         {"edges", edges_json},
         {"question_attention", question_attention},
         {"gloss_attention", gloss_attention},
         {"gloss_norms", gloss_norms},
         {"answer", answer ? json(*answer) : json(nullptr)}};
  return j.dump(1);
}

namespace {

std::string DotQuote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

std::string FormatWeight(double w) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", w);
  return buf;
}

}  // namespace

std::string ForwardTrace::ToDot() const {
  std::ostringstream out;
  out << "digraph " << DotQuote(question_id) << " {\n  rankdir=LR;\n";
  for (const std::string &q : question_entities) {
    out << "  " << DotQuote("q:" + q) << " [shape=box, label=" << DotQuote(q) << "];\n";
  }
  for (size_t i = 0; i < candidates.size(); ++i) {
    const bool chosen = answer && *answer == candidates[i];
    out << "  " << DotQuote("a:" + candidates[i]) << " [shape=ellipse, label="
        << DotQuote(candidates[i] + "\np=" + FormatWeight(probabilities[i]))
        << (chosen ? ", peripheries=2" : "") << "];\n";
  }
  for (const EdgeTrace &e : edges) {
    std::string label;
    for (size_t l = 0; l < e.scores.size(); ++l) {
      if (l) label += " / ";
      label += FormatWeight(e.scores[l]);
    }
    const double last = e.scores.empty() ? 0.0 : e.scores.back();
    out << "  " << DotQuote("q:" + e.question_entity) << " -> "
        << DotQuote("a:" + e.candidate) << " [label=" << DotQuote(label)
        << ", penwidth=" << FormatWeight(0.5 + 4.0 * last) << "];\n";
  }
  out << "}\n";
  return out.str();
}

GroundedGraph CollapseStructure(const GroundedGraph &graph) {
  GroundedGraph out;
  out.question_id = graph.question_id;
  out.question_text = graph.question_text;
  out.answer_entity_id = graph.answer_entity_id;
  out.excluded = graph.excluded;
  out.candidates_before_pruning = graph.candidates_before_pruning;
  out.answer_in_all_candidates = graph.answer_in_all_candidates;
  out.answer_kept = graph.answer_kept;
  out.node_scores = graph.node_scores;
  out.candidates = graph.candidates;
  if (graph.question_entities.empty()) return out;

  out.question_entities = {kMergedQuestionNode};
  std::vector<std::string> ids = graph.question_entities;
  std::sort(ids.begin(), ids.end());
  std::string merged_gloss;
  for (const std::string &id : ids) {
    auto it = graph.glosses.find(id);
    if (it == graph.glosses.end() || it->second.empty()) continue;
    if (!merged_gloss.empty()) merged_gloss += ' ';
    merged_gloss += it->second;
  }
  out.glosses[kMergedQuestionNode] = merged_gloss;

  std::map<std::string, GroundedEdge> pseudo;
  std::vector<const GroundedEdge *> edges;
  for (const GroundedEdge &e : graph.edges) edges.push_back(&e);
  std::sort(edges.begin(), edges.end(), [](const GroundedEdge *x, const GroundedEdge *y) {
    return x->question_entity < y->question_entity;
  });
  std::map<std::string, std::set<std::string>> seen;
  for (const GroundedEdge *e : edges) {
    GroundedEdge &p = pseudo[e->candidate];
    p.question_entity = kMergedQuestionNode;
    p.candidate = e->candidate;
    for (const EvidenceSentence &s : e->sentences) {
      if (seen[e->candidate].insert(s.text).second) p.sentences.push_back(s);
    }
  }
  for (const std::string &c : graph.candidates) {
    auto it = pseudo.find(c);
    if (it != pseudo.end()) out.edges.push_back(std::move(it->second));
    auto g = graph.glosses.find(c);
    out.glosses[c] = g == graph.glosses.end() ? "" : g->second;
  }
  return out;
}

DelftModel::DelftModel(ModelConfig config, TokenVocabulary vocab)
    : config_(std::move(config)), vocab_(std::move(vocab)) {
  config_.Validate();
  Rng rng(config_.seed, "model-init");
  const size_t d = config_.embed_dim, h = config_.rnn_hidden, s = config_.state_dim();

  embeddings_ = params_.Add("embeddings", Tensor::Zeros({vocab_.size(), d}, true));
  const double bound = std::sqrt(3.0 / static_cast<double>(d));
  for (double &v : embeddings_.mutable_values()) v = rng.Uniform(-bound, bound);

  text_fwd_ = nn::CreateGru(params_, "text_encoder.fwd", d, h, rng);
  text_bwd_ = nn::CreateGru(params_, "text_encoder.bwd", d, h, rng);
  sent_fwd_ = nn::CreateGru(params_, "sentence_encoder.fwd", d, h, rng);
  sent_bwd_ = nn::CreateGru(params_, "sentence_encoder.bwd", d, h, rng);
  self_attention_ = params_.Create("self_attention", {s}, rng);
  bilinear_ = params_.Create("inter_attention", {s, s}, rng);
  for (size_t l = 0; l < config_.layers; ++l) {
    const std::string p = "layer" + std::to_string(l);
    const size_t f = config_.ffn_dim;
    Layer layer;
    layer.question = nn::CreateFeedForward(params_, p + ".question", s, f, s, rng);
    layer.sentence = nn::CreateFeedForward(params_, p + ".sentence", s, f, s, rng);
    layer.question_node = nn::CreateFeedForward(params_, p + ".question_node", s, f, s, rng);
    layer.message = nn::CreateFeedForward(params_, p + ".message", 2 * s, f, s, rng);
    layer.candidate = nn::CreateFeedForward(params_, p + ".candidate", s, f, s, rng);
    layers_.push_back(layer);
  }
  scorer_ = nn::CreateMlp(params_, "answer_mlp", s, config_.mlp_dims, rng);
  if (!config_.embeddings_path.empty()) LoadPretrainedVectors(config_.embeddings_path);
}

size_t DelftModel::LoadPretrainedVectors(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  const size_t d = config_.embed_dim;
  auto values = embeddings_.mutable_values();
  std::string line;
  size_t line_no = 0, loaded = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string word;
    if (!(fields >> word)) continue;
    std::vector<double> vec;
    double v;
    while (fields >> v) vec.push_back(v);
    if (line_no == 1 && vec.size() == 1) continue;  // "count dim" header
    if (vec.size() != d) {
      throw FormatError(path + " line " + std::to_string(line_no) + ": expected " +
                        std::to_string(d) + " values, got " + std::to_string(vec.size()));
    }
    const size_t id = vocab_.Id(Lowercase(word));
    if (id == 0) continue;
    std::copy(vec.begin(), vec.end(), values.begin() + id * d);
    ++loaded;
  }
  return loaded;
}

namespace {

std::vector<Tensor> EmbedTokens(const Tensor &table, const TokenVocabulary &vocab,
                                const std::vector<std::string> &tokens) {
  std::vector<Tensor> out;
  out.reserve(tokens.size());
  for (const std::string &t : tokens) out.push_back(nn::Row(table, vocab.Id(t)));
  return out;
}

}  // namespace

Tensor DelftModel::EncodeSelfAttentive(const std::string &text,
                                       std::vector<double> *weights) const {
  const std::vector<std::string> tokens = ModelTokens(text);
  if (tokens.empty()) throw Error("cannot encode a text without word tokens");
  const std::vector<Tensor> states =
      nn::BiGruEncode(text_fwd_, text_bwd_, EmbedTokens(embeddings_, vocab_, tokens));
  if (config_.ablation.no_self_attention) {
    if (weights) weights->assign(states.size(), 1.0 / static_cast<double>(states.size()));
    return nn::Mean(states);
  }
  const Tensor attention = nn::Softmax(nn::AttentionLogits(states, self_attention_));
  if (weights) weights->assign(attention.values().begin(), attention.values().end());
  return nn::WeightedSum(attention, states);
}

DelftModel::Output DelftModel::Forward(const GroundedGraph &input) const {
  GroundedGraph collapsed;
  const GroundedGraph *graph = &input;
  if (config_.ablation.collapse_structure) {
    collapsed = CollapseStructure(input);
    graph = &collapsed;
  }
  if (graph->question_entities.empty()) {
    throw Error("question " + graph->question_id + " has no question entities");
  }
  const size_t dim = config_.state_dim();
  Output out;
  ForwardTrace &trace = out.trace;
  trace.question_id = graph->question_id;
  trace.question_entities = graph->question_entities;
  trace.candidates = graph->candidates;

  Tensor question = EncodeSelfAttentive(graph->question_text, &trace.question_attention);

  // Initial node representations.
  std::map<std::string, Tensor> nodes;
  auto init_node = [&](const std::string &id) {
    if (nodes.count(id)) return;
    Tensor gloss = Tensor::Zeros({dim});
    std::vector<double> weights;
    auto it = graph->glosses.find(id);
    if (!config_.ablation.no_gloss && it != graph->glosses.end() &&
        !ModelTokens(it->second).empty()) {
      gloss = EncodeSelfAttentive(it->second, &weights);
    }
    double norm = 0.0;
    for (double v : gloss.values()) norm += v * v;
    trace.gloss_attention[id] = std::move(weights);
    trace.gloss_norms[id] = std::sqrt(norm);
    nodes[id] = nn::Add(gloss, question);
  };
  for (const std::string &q : graph->question_entities) init_node(q);
  for (const std::string &c : graph->candidates) init_node(c);

  // Edge sentences. Recurrent states depend only on the sentence, so they
  // are shared between edges carrying the same text.
  struct EdgeState {
    const GroundedEdge *edge;
    std::vector<size_t> order;  // sentence indices sorted by text
    std::vector<Tensor> sentences;
    Tensor rep;
  };
  std::map<std::string, std::vector<Tensor>> encoded;
  const Tensor attention_query =
      config_.ablation.no_edge_sentences ? Tensor() : nn::MatVec(bilinear_, question);
  std::vector<EdgeState> edges;
  edges.reserve(graph->edges.size());
  trace.sentence_attention.resize(graph->edges.size());
  for (size_t ei = 0; ei < graph->edges.size(); ++ei) {
    const GroundedEdge &e = graph->edges[ei];
    if (!nodes.count(e.question_entity) || !nodes.count(e.candidate)) {
      throw Error("edge " + e.question_entity + " / " + e.candidate + " references an unknown node");
    }
    EdgeState state{&e, {}, {}, {}};
    if (config_.ablation.no_edge_sentences) {
      state.rep = Tensor::Zeros({dim});
      edges.push_back(std::move(state));
      continue;
    }
    if (e.sentences.empty()) throw Error("edge without sentences in question " + graph->question_id);
    for (const EvidenceSentence &s : e.sentences) {
      auto it = encoded.find(s.text);
      if (it == encoded.end()) {
        std::vector<std::string> tokens = ModelTokens(s.text);
        if (tokens.empty()) tokens.push_back(TokenVocabulary::kUnknown);
        it = encoded
                 .emplace(s.text, nn::BiGruEncode(sent_fwd_, sent_bwd_,
                                                  EmbedTokens(embeddings_, vocab_, tokens)))
                 .first;
      }
      const Tensor weights = nn::Softmax(nn::AttentionLogits(it->second, attention_query));
      trace.sentence_attention[ei].emplace_back(weights.values().begin(), weights.values().end());
      state.sentences.push_back(nn::WeightedSum(weights, it->second));
    }
    state.order.resize(e.sentences.size());
    std::iota(state.order.begin(), state.order.end(), 0);
    std::stable_sort(state.order.begin(), state.order.end(), [&](size_t a, size_t b) {
      return e.sentences[a].text < e.sentences[b].text;
    });
    edges.push_back(std::move(state));
  }
  auto edge_mean = [](const EdgeState &s) {
    std::vector<Tensor> ordered;
    for (size_t i : s.order) ordered.push_back(s.sentences[i]);
    return nn::Mean(ordered);
  };
  for (EdgeState &s : edges) {
    if (!s.sentences.empty()) s.rep = edge_mean(s);
  }

  // Messages into each candidate are summed in question entity order so the
  // result does not depend on the order edges are listed in.
  std::map<std::string, std::vector<size_t>> incoming;
  for (size_t ei = 0; ei < edges.size(); ++ei) incoming[edges[ei].edge->candidate].push_back(ei);
  for (auto &[c, list] : incoming) {
    std::sort(list.begin(), list.end(), [&](size_t a, size_t b) {
      return edges[a].edge->question_entity < edges[b].edge->question_entity;
    });
  }

  trace.edges.resize(edges.size());
  for (size_t ei = 0; ei < edges.size(); ++ei) {
    trace.edges[ei].question_entity = edges[ei].edge->question_entity;
    trace.edges[ei].candidate = edges[ei].edge->candidate;
  }
  const Tensor one = Tensor::Scalar(1.0);
  for (const Layer &layer : layers_) {
    question = layer.question(question);
    for (const std::string &q : graph->question_entities) {
      nodes[q] = layer.question_node(nn::Add(nodes[q], question));
    }
    std::vector<Tensor> messages(edges.size());
    for (size_t ei = 0; ei < edges.size(); ++ei) {
      EdgeState &s = edges[ei];
      if (!s.sentences.empty()) {
        for (Tensor &t : s.sentences) t = layer.sentence(t);
        s.rep = edge_mean(s);
      }
      const Tensor gate = config_.ablation.no_edge_importance
                              ? one
                              : nn::Sigmoid(nn::Dot(question, s.rep));
      trace.edges[ei].scores.push_back(gate.item());
      const Tensor joined[] = {nodes[s.edge->question_entity], s.rep};
      messages[ei] = nn::Scale(gate, layer.message(nn::Concat(joined)));
    }
    for (const std::string &c : graph->candidates) {
      std::vector<Tensor> terms{nodes[c], question};
      for (size_t ei : incoming[c]) terms.push_back(messages[ei]);
      nodes[c] = layer.candidate(nn::AddN(terms));
    }
  }

  for (size_t ei = 0; ei < edges.size(); ++ei) {
    const EdgeState &s = edges[ei];
    if (s.sentences.empty()) {
      if (!s.edge->sentences.empty()) trace.edges[ei].best_sentence = s.edge->sentences[0].text;
      continue;
    }
    size_t best = s.order[0];
    double best_score = -1.0;
    for (size_t i : s.order) {
      double z = 0.0;
      for (size_t k = 0; k < dim; ++k) z += question.at(k) * s.sentences[i].at(k);
      const double g = SigmoidOf(z);
      if (g > best_score) {
        best_score = g;
        best = i;
      }
    }
    trace.edges[ei].best_sentence = s.edge->sentences[best].text;
  }

  for (const std::string &c : graph->candidates) {
    Tensor logit = scorer_(nodes[c]);
    trace.probabilities.push_back(SigmoidOf(logit.item()));
    out.logits.push_back(std::move(logit));
  }
  return out;
}

Tensor DelftModel::Loss(const GroundedGraph &graph) const {
  if (!graph.answer_entity_id) throw Error("question " + graph.question_id + " has no answer");
  Output out = Forward(graph);
  std::vector<Tensor> terms;
  bool found = false;
  for (size_t i = 0; i < graph.candidates.size(); ++i) {
    const bool positive = graph.candidates[i] == *graph.answer_entity_id;
    found = found || positive;
    terms.push_back(nn::BceWithLogits(out.logits[i], positive ? 1.0 : 0.0));
  }
  if (!found) throw Error("answer of question " + graph.question_id + " is not a candidate");
  return nn::Mean(terms);
}

ForwardTrace DelftModel::Predict(const GroundedGraph &graph) const {
  if (graph.question_entities.empty() || graph.candidates.empty()) {
    ForwardTrace empty;
    empty.question_id = graph.question_id;
    empty.question_entities = graph.question_entities;
    return empty;
  }
  nn::NoGradGuard no_grad;
  Output out = Forward(graph);
  size_t best = 0;
  for (size_t i = 1; i < graph.candidates.size(); ++i) {
    const double a = out.logits[i].item(), b = out.logits[best].item();
    if (a > b || (a == b && graph.candidates[i] < graph.candidates[best])) best = i;
  }
  out.trace.answer = graph.candidates[best];
  return std::move(out.trace);
}

void DelftModel::Save(const std::string &path) const {
  json meta{{"config", json::parse(config_.ToJson())}, {"vocabulary", vocab_.tokens()}};
  nn::SaveCheckpoint(path, params_, meta.dump());
}

DelftModel DelftModel::Load(const std::string &path) {
  const std::string text = nn::ReadCheckpointMetadata(path);
  ModelConfig config;
  std::vector<std::string> tokens;
  try {
    const json meta = json::parse(text);
    config = ModelConfig::FromJson(meta.at("config").dump());
    tokens = meta.at("vocabulary").get<std::vector<std::string>>();
  } catch (const json::exception &e) {
    throw FormatError(path + ": bad checkpoint metadata: " + e.what());
  }
  // Stored values already include any pretrained vectors.
  const std::string embeddings_path = config.embeddings_path;
  config.embeddings_path.clear();
  DelftModel model(config, TokenVocabulary(std::move(tokens)));
  nn::LoadCheckpoint(path, model.params_);
  model.config_.embeddings_path = embeddings_path;
  return model;
}

nn::GradCheckReport CheckModelGradients(const DelftModel &model, const GroundedGraph &graph,
                                        double epsilon, double tolerance) {
  return nn::GradCheck([&] { return model.Loss(graph); }, model.params().params(), epsilon,
                       tolerance);
}

std::vector<ForwardTrace> PredictAll(const DelftModel &model,
                                     const std::vector<GroundedGraph> &graphs, int threads) {
  std::vector<ForwardTrace> out(graphs.size());
  ParallelFor(graphs.size(), threads, [&](size_t i) { out[i] = model.Predict(graphs[i]); });
  return out;
}

TrainResult Train(DelftModel &model, const std::vector<GroundedGraph> &graphs,
                  const TrainOptions &options,
                  const std::function<void(const EpochStats &)> &on_epoch) {
  if (options.batch_size == 0) throw Error("batch size must be at least 1");
  TrainResult result;
  std::vector<GroundedGraph> usable;
  for (const GroundedGraph &g : graphs) {
    if (!g.excluded && g.answer_kept && !g.candidates.empty()) {
      usable.push_back(g);
    } else {
      ++result.skipped_questions;
    }
  }
  if (usable.empty()) throw Error("no training question has its answer among the candidates");
  result.used_questions = usable.size();
  if (!options.checkpoint_dir.empty()) std::filesystem::create_directories(options.checkpoint_dir);

  nn::Adam adam(options.adam);
  Rng rng(options.seed, "shuffle");
  std::vector<size_t> order(usable.size());
  std::iota(order.begin(), order.end(), 0);
  for (size_t epoch = 1; epoch <= options.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    rng.Shuffle(order);
    double total = 0.0;
    for (size_t lo = 0; lo < order.size(); lo += options.batch_size) {
      const size_t hi = std::min(order.size(), lo + options.batch_size);
      model.params().ZeroGrad();
      for (size_t i = lo; i < hi; ++i) {
        const Tensor loss = model.Loss(usable[order[i]]);
        total += loss.item();
        nn::Backward(loss);
      }
      adam.Step(model.params(), 1.0 / static_cast<double>(hi - lo));
    }
    EpochStats stats;
    stats.epoch = epoch;
    stats.mean_loss = total / static_cast<double>(usable.size());
    const std::vector<ForwardTrace> predictions = PredictAll(model, usable, options.threads);
    size_t correct = 0;
    for (size_t i = 0; i < usable.size(); ++i) {
      correct += predictions[i].answer == usable[i].answer_entity_id;
    }
    stats.train_accuracy = static_cast<double>(correct) / static_cast<double>(usable.size());
    stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.epochs.push_back(stats);
    if (!options.checkpoint_dir.empty()) {
      const std::filesystem::path dir(options.checkpoint_dir);
      model.Save((dir / ("epoch-" + std::to_string(epoch) + ".ckpt")).string());
      model.Save((dir / "model.ckpt").string());
    }
    if (on_epoch) on_epoch(stats);
    if (stats.train_accuracy >= options.stop_at_train_accuracy) break;
  }
  return result;
}

}  // namespace ftqa
