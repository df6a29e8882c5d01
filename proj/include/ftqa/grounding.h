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

// Question grounding: from a question to a bipartite evidence graph between
// the entities the question mentions and candidate answer entities, pruned
// to a fixed node and sentence budget.

#ifndef FTQA_GROUNDING_H_
#define FTQA_GROUNDING_H_

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ftqa/corpus.h"
#include "ftqa/ftkg.h"
#include "ftqa/index.h"

namespace ftqa {

struct GroundedEdge {
  std::string question_entity;
  std::string candidate;
  std::vector<EvidenceSentence> sentences;
  bool operator==(const GroundedEdge &) const = default;
};

struct NodeScore {
  std::string candidate;
  double score = 0.0;
  // Edge sentence achieving the score.
  std::string best_question_entity;
  std::string best_sentence;
  bool operator==(const NodeScore &) const = default;
};

struct GroundedGraph {
  std::string question_id;
  std::string question_text;
  std::vector<std::string> question_entities;  // order of first mention
  std::vector<std::string> candidates;         // ascending id
  std::vector<GroundedEdge> edges;             // ascending (question entity, candidate)
  std::map<std::string, std::string> glosses;  // every node's gloss
  std::optional<std::string> answer_entity_id;

  // No question entities were linked; the pipeline cannot answer.
  bool excluded = false;
  size_t candidates_before_pruning = 0;
  bool answer_in_all_candidates = false;
  // False when the answer was pruned (or never found).
  bool answer_kept = false;
  std::vector<NodeScore> node_scores;  // rank order

  // Edges incident to a candidate, in edge order.
  std::vector<const GroundedEdge *> EdgesOf(std::string_view candidate) const;
  bool operator==(const GroundedGraph &) const = default;
};

// Relevance of one evidence sentence for a candidate, in [0, 1].
class EdgeScorer {
 public:
  virtual ~EdgeScorer() = default;
  virtual double Score(std::string_view question, std::string_view sentence,
                       std::string_view gloss) const = 0;
};

// Logistic model over three lexical features:
//   0: tf-idf cosine(question, sentence)
//   1: fraction of distinct question terms present in the sentence
//   2: tf-idf cosine(question, candidate gloss)
struct LexicalScorerWeights {
  std::array<double, 3> w{6.0, 4.0, 2.0};
  double bias = -3.0;
  bool operator==(const LexicalScorerWeights &) const = default;
};

class LexicalEdgeScorer : public EdgeScorer {
 public:
  static constexpr size_t kFeatures = 3;
  using Weights = LexicalScorerWeights;

  explicit LexicalEdgeScorer(const Index *index, Weights weights = Weights())
      : index_(index), weights_(weights) {}

  std::array<double, kFeatures> Features(std::string_view question, std::string_view sentence,
                                         std::string_view gloss) const;
  double Score(std::string_view question, std::string_view sentence,
               std::string_view gloss) const override;
  double ScoreFeatures(const std::array<double, kFeatures> &features) const;

  const Weights &weights() const { return weights_; }
  void set_weights(const Weights &w) { weights_ = w; }

  void Save(const std::string &path) const;
  static Weights LoadWeights(const std::string &path);

 private:
  const Index *index_;
  Weights weights_;
};

struct ScorerExample {
  std::array<double, LexicalEdgeScorer::kFeatures> features{};
  double label = 0.0;
  bool operator==(const ScorerExample &) const = default;
};

// Samples one positive (a sentence on an edge to the answer) and up to
// `negatives` sentences on other candidates' edges per question, using
// unpruned grounded graphs.
std::vector<ScorerExample> SampleScorerExamples(const std::vector<GroundedGraph> &graphs,
                                                const LexicalEdgeScorer &scorer,
                                                size_t negatives, uint64_t seed);

// Class-balanced L2-regularized logistic regression fit by Newton steps.
// Throws Error when there are no positive examples.
LexicalEdgeScorer::Weights FitScorer(const std::vector<ScorerExample> &examples,
                                     double l2 = 1e-3);

struct GroundingOptions {
  double link_threshold = 0.1;
  size_t retrieved_docs = 3;
  size_t prefilter_sentences = 1000;
  size_t top_k = 50;
  size_t sentences_per_edge = 5;
};

// Read-only resources shared by all questions.
struct GroundingContext {
  const Corpus *corpus = nullptr;
  const LinkedCorpus *linked = nullptr;  // at the grounding link threshold
  const FreeTextGraph *graph = nullptr;
  const Index *index = nullptr;          // one unit per document, in order
  const EdgeScorer *scorer = nullptr;
};

// Builds the retrieval index over corpus documents.
Index BuildDocumentIndex(const Corpus &corpus);

std::vector<std::string> ExtractQuestionEntities(std::string_view question,
                                                 const Corpus &corpus, double threshold);

// Union of entities linked on the question entities' pages and entities
// on (or described by) the top retrieved documents, minus the question
// entities. Ascending id.
std::vector<std::string> GenerateCandidates(const std::vector<std::string> &question_entities,
                                            std::string_view question,
                                            const GroundingContext &context,
                                            size_t retrieved_docs);

// Raw grounded graph: every (question entity, candidate) pair with a graph
// edge, all sentences; candidates without edges are dropped.
GroundedGraph AttachEvidenceEdges(const std::vector<std::string> &question_entities,
                                  const std::vector<std::string> &candidates,
                                  const FreeTextGraph &graph);

// Keeps the `limit` edge sentences most similar to the question over the
// whole graph (ties by edge then sentence order), dropping emptied edges and
// edgeless candidates.
void PrefilterSentences(GroundedGraph &graph, const Index &index, size_t limit);

// Scores every candidate by its best edge sentence and keeps the top k.
void ScoreAndPruneNodes(GroundedGraph &graph, const EdgeScorer &scorer, size_t k);

// Keeps each edge's `limit` sentences most similar to the question, ties by
// corpus order, in ranked order.
void FilterEdgeSentences(GroundedGraph &graph, const Index &index, size_t limit);

// Full grounding of one question.
GroundedGraph GroundQuestion(const Question &question, const GroundingContext &context,
                             const GroundingOptions &options);

std::string GroundedGraphToJson(const GroundedGraph &graph);
GroundedGraph GroundedGraphFromJson(const std::string &text);
void WriteGroundedGraph(const GroundedGraph &graph, const std::string &dir);
GroundedGraph ReadGroundedGraph(const std::string &path);
// All *.json files of a directory, sorted by file name.
std::vector<GroundedGraph> ReadGroundedDir(const std::string &dir);

}  // namespace ftqa

#endif  // FTQA_GROUNDING_H_
