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

// End-to-end orchestration shared by the command line tool, the Python
// bindings and the acceptance tests.

#ifndef FTQA_PIPELINE_H_
#define FTQA_PIPELINE_H_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ftqa/corpus.h"
#include "ftqa/eval.h"
#include "ftqa/ftkg.h"
#include "ftqa/grounding.h"
#include "ftqa/index.h"
#include "ftqa/model.h"

namespace ftqa {

struct PipelineConfig {
  // Grounding.
  double link_threshold = 0.1;
  size_t retrieved_docs = 3;
  size_t sentences_per_edge = 5;
  size_t top_k_train = 20;
  size_t top_k_eval = 50;
  size_t prefilter_sentences = 1000;

  // Model and training.
  ModelConfig model;
  size_t epochs = 30;
  size_t batch_size = 8;
  double learning_rate = 1e-3;
  double clip_norm = 5.0;
  size_t scorer_negatives = 10;

  uint64_t seed = 1;
  int threads = 1;

  // Throws Error naming the flag of the first invalid field.
  void Validate() const;
  GroundingOptions Grounding(bool training) const;
  TrainOptions Training() const;
  // The model config with the pipeline seed applied.
  ModelConfig ResolvedModel() const;

  // Every field, with the resolved model config nested under "model".
  std::string ToJson() const;
  // Starts from defaults and overrides the keys present. Unknown keys are
  // rejected.
  static PipelineConfig FromJson(const std::string &text, PipelineConfig base);
  static PipelineConfig FromJson(const std::string &text);
  // FNV-1a of ToJson() with the thread count left out, since results do not
  // depend on it.
  uint64_t Fingerprint() const;
};

// Corpus-level resources built once and shared read-only by all questions.
class Workspace {
 public:
  Workspace(Corpus corpus, const PipelineConfig &config);
  // Reuses a prebuilt graph and index.
  Workspace(Corpus corpus, FreeTextGraph graph, Index index, const PipelineConfig &config);
  // The scorer points into the workspace's own index.
  Workspace(const Workspace &) = delete;
  Workspace &operator=(const Workspace &) = delete;

  const Corpus &corpus() const { return corpus_; }
  const LinkedCorpus &linked() const { return linked_; }
  const FreeTextGraph &graph() const { return graph_; }
  const Index &index() const { return index_; }
  const LexicalEdgeScorer &scorer() const { return scorer_; }
  void set_scorer_weights(const LexicalEdgeScorer::Weights &w) { scorer_.set_weights(w); }

  GroundedGraph Ground(const Question &question, const GroundingOptions &options) const;
  // Parallel over questions; output order follows the input.
  std::vector<GroundedGraph> GroundAll(const std::vector<Question> &questions,
                                       const GroundingOptions &options, int threads) const;

  // Fits the edge scorer on unpruned groundings of `questions` and installs
  // the result.
  LexicalEdgeScorer::Weights TrainScorer(const std::vector<Question> &questions,
                                         const PipelineConfig &config);

 private:
  Corpus corpus_;
  LinkedCorpus linked_;
  FreeTextGraph graph_;
  Index index_;
  LexicalEdgeScorer scorer_;
};

struct Experiment {
  MetricsReport metrics;
  TrainResult training;
  std::vector<Prediction> predictions;
};

// Builds a model over the training graphs' vocabulary, trains it and
// evaluates on the test graphs.
Experiment TrainAndEvaluate(const std::vector<GroundedGraph> &train,
                            const std::vector<GroundedGraph> &test, const PipelineConfig &config,
                            std::unique_ptr<DelftModel> *model_out = nullptr);

// A hand-built grounded graph with two question entities, three candidates
// and at most two sentences per edge, for gradient checks and smoke runs.
GroundedGraph ToyGroundedGraph();
// Model dimensions of 8 throughout, one hidden scoring layer.
ModelConfig ToyModelConfig();

std::vector<Prediction> ToPredictions(const std::vector<ForwardTrace> &traces);

}  // namespace ftqa

#endif  // FTQA_PIPELINE_H_
