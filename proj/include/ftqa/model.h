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

// Graph neural network answer selector over grounded graphs.
//
// Initial representations:
//   question  h_q  = self-attentive pooling of BiGRU states over its tokens
//   gloss     h_g  = same encoder and pooling over the node's gloss
//   node      h_v  = h_g + h_q
//   sentence  h_s  = bilinear attention pooling of a second BiGRU's states,
//                    queried by h_q
//   edge      h_e  = mean of its sentences' h_s
// Each of the L layers then updates
//   h_q  <- FFN_q(h_q)             h_s <- FFN_s(h_s), h_e = mean h_s
//   h_vq <- FFN_vq(h_vq + h_q)     a_e = sigmoid(h_q . h_e)
//   f_e   = a_e * FFN_f([h_vq; h_e])
//   h_va <- FFN_va(h_va + h_q + sum of f_e over the candidate's edges)
// and each candidate scores sigmoid(MLP(h_va)).

#ifndef FTQA_MODEL_H_
#define FTQA_MODEL_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ftqa/grounding.h"
#include "ftqa/nn.h"

namespace ftqa {

struct AblationFlags {
  bool no_gloss = false;
  bool no_edge_sentences = false;
  bool no_edge_importance = false;
  bool no_self_attention = false;
  bool collapse_structure = false;
  bool operator==(const AblationFlags &) const = default;
};

// Accepts the flag spellings "no-gloss", "no-edge-sentences",
// "no-edge-importance", "no-self-attention" and "collapse-structure"
// (underscores also accepted). Throws Error for anything else.
void EnableAblation(AblationFlags &flags, std::string_view name);
std::vector<std::string> AblationNames(const AblationFlags &flags);

struct ModelConfig {
  size_t embed_dim = 300;
  size_t rnn_hidden = 300;  // per direction; states are twice as wide
  size_t ffn_dim = 600;
  std::vector<size_t> mlp_dims{600, 300};
  size_t layers = 3;
  // Optional text file of pretrained word vectors: "word v1 ... vd" lines.
  std::string embeddings_path;
  AblationFlags ablation;
  uint64_t seed = 1;

  size_t state_dim() const { return 2 * rnn_hidden; }
  // Throws Error naming the offending field.
  void Validate() const;
  std::string ToJson() const;
  static ModelConfig FromJson(const std::string &text);
  bool operator==(const ModelConfig &) const = default;
};

// Lowercased word tokens as seen by the model.
std::vector<std::string> ModelTokens(std::string_view text);

// Token ids for the embedding table. Id 0 is the shared unknown token.
class TokenVocabulary {
 public:
  static constexpr const char *kUnknown = "<unk>";

  TokenVocabulary() : tokens_{kUnknown} {}
  explicit TokenVocabulary(std::vector<std::string> tokens);

  // Every token of question texts, glosses and edge sentences, in first
  // appearance order.
  static TokenVocabulary Build(const std::vector<GroundedGraph> &graphs);

  size_t Id(std::string_view token) const;
  size_t size() const { return tokens_.size(); }
  const std::vector<std::string> &tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, size_t> ids_;
};

struct EdgeTrace {
  std::string question_entity;
  std::string candidate;
  std::vector<double> scores;  // a_e per layer
  // Sentence with the highest final-layer gate sigmoid(h_q . h_s).
  std::string best_sentence;
};

struct ForwardTrace {
  std::string question_id;
  std::vector<std::string> question_entities;  // merged node id in collapse mode
  std::vector<std::string> candidates;         // input order
  std::vector<double> probabilities;           // aligned with candidates
  std::vector<EdgeTrace> edges;
  std::vector<double> question_attention;      // self-attention over question tokens
  // Per node: gloss self-attention weights and the gloss vector's norm.
  std::map<std::string, std::vector<double>> gloss_attention;
  std::map<std::string, double> gloss_norms;
  // Inter-attention weights per edge and sentence, in edge order.
  std::vector<std::vector<std::vector<double>>> sentence_attention;
  std::optional<std::string> answer;

  std::string ToJson() const;
  // Graph description in the DOT language.
  std::string ToDot() const;
};

// Id of the single question node in collapse-structure mode.
inline constexpr const char kMergedQuestionNode[] = "<question>";

class DelftModel {
 public:
  // Creates parameters from config.seed. Loads pretrained vectors when
  // config.embeddings_path is set.
  DelftModel(ModelConfig config, TokenVocabulary vocab);

  const ModelConfig &config() const { return config_; }
  const TokenVocabulary &vocabulary() const { return vocab_; }
  nn::ParameterSet &params() { return params_; }
  const nn::ParameterSet &params() const { return params_; }

  struct Output {
    std::vector<nn::Tensor> logits;  // aligned with the graph's candidates
    ForwardTrace trace;
  };
  // Throws Error for graphs without question entities.
  Output Forward(const GroundedGraph &graph) const;

  // Mean binary cross entropy over candidates. Throws Error unless the
  // answer is among the candidates.
  nn::Tensor Loss(const GroundedGraph &graph) const;

  // Highest-probability candidate (ties to the smaller id) with the trace.
  // No answer when the graph has no candidates or no question entities.
  ForwardTrace Predict(const GroundedGraph &graph) const;

  void Save(const std::string &path) const;
  static DelftModel Load(const std::string &path);

  // Overwrites embedding rows for known words; returns the number loaded.
  size_t LoadPretrainedVectors(const std::string &path);

 private:
  struct Layer {
    nn::FeedForward question, sentence, question_node, message, candidate;
  };

  nn::Tensor EncodeSelfAttentive(const std::string &text, std::vector<double> *weights) const;

  ModelConfig config_;
  TokenVocabulary vocab_;
  nn::ParameterSet params_;
  nn::Tensor embeddings_;
  nn::GruWeights text_fwd_, text_bwd_, sent_fwd_, sent_bwd_;
  nn::Tensor self_attention_;
  nn::Tensor bilinear_;
  std::vector<Layer> layers_;
  nn::Mlp scorer_;
};

// The structure-collapsed view: one merged question node whose gloss is
// the question entities' glosses, and one pseudo-edge per candidate
// carrying all of the candidate's sentences.
GroundedGraph CollapseStructure(const GroundedGraph &graph);

struct TrainOptions {
  size_t epochs = 30;
  size_t batch_size = 8;
  nn::AdamConfig adam;
  // Seeds the shuffling stream.
  uint64_t seed = 1;
  // Stop once training exact match reaches this value; > 1 disables.
  double stop_at_train_accuracy = 2.0;
  // Writes {dir}/epoch-{n}.ckpt and {dir}/model.ckpt when set.
  std::string checkpoint_dir;
  int threads = 1;  // for the per-epoch accuracy pass only
};

struct EpochStats {
  size_t epoch = 0;
  double mean_loss = 0.0;
  double train_accuracy = 0.0;
  double seconds = 0.0;
};

struct TrainResult {
  std::vector<EpochStats> epochs;
  size_t used_questions = 0;
  size_t skipped_questions = 0;
};

// Trains on graphs whose answer survived pruning; the others are skipped.
// Throws Error when nothing is left to train on.
TrainResult Train(DelftModel &model, const std::vector<GroundedGraph> &graphs,
                  const TrainOptions &options,
                  const std::function<void(const EpochStats &)> &on_epoch = {});

// Central-difference check of Loss(graph) against backpropagation over
// every parameter value.
nn::GradCheckReport CheckModelGradients(const DelftModel &model, const GroundedGraph &graph,
                                        double epsilon, double tolerance);

// Predictions for every graph, computed in parallel without gradients.
std::vector<ForwardTrace> PredictAll(const DelftModel &model,
                                     const std::vector<GroundedGraph> &graphs, int threads);

}  // namespace ftqa

#endif  // FTQA_MODEL_H_
