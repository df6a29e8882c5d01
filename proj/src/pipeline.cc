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

#include "ftqa/pipeline.h"

#include <limits>

#include <json.hpp>

#include "ftqa/error.h"
#include "ftqa/parallel.h"
#include "ftqa/random.h"

namespace ftqa {

using json = nlohmann::json;

void PipelineConfig::Validate() const {
  if (link_threshold < 0 || link_threshold > 1) {
    throw Error("--link-threshold must lie in [0, 1]");
  }
  if (sentences_per_edge < 1) throw Error("--sentences-per-edge must be at least 1");
  if (top_k_train < 1) throw Error("--top-k-train must be at least 1");
  if (top_k_eval < 1) throw Error("--top-k-eval must be at least 1");
  if (prefilter_sentences < 1) throw Error("--prefilter-sentences must be at least 1");
  if (batch_size < 1) throw Error("--batch-size must be at least 1");
  if (!(learning_rate > 0)) throw Error("--learning-rate must be positive");
  if (threads < 1) throw Error("--threads must be at least 1");
  try {
    model.Validate();
  } catch (const Error &e) {
    throw Error(std::string("model: ") + e.what());
  }
}

GroundingOptions PipelineConfig::Grounding(bool training) const {
  GroundingOptions g;
  g.link_threshold = link_threshold;
  g.retrieved_docs = retrieved_docs;
  g.prefilter_sentences = prefilter_sentences;
  g.top_k = training ? top_k_train : top_k_eval;
  g.sentences_per_edge = sentences_per_edge;
  return g;
}

TrainOptions PipelineConfig::Training() const {
  TrainOptions t;
  t.epochs = epochs;
  t.batch_size = batch_size;
  t.adam.learning_rate = learning_rate;
  t.adam.clip_norm = clip_norm;
  t.seed = seed;
  t.threads = threads;
  return t;
}

ModelConfig PipelineConfig::ResolvedModel() const {
  ModelConfig m = model;
  m.seed = seed;
  return m;
}

std::string PipelineConfig::ToJson() const {
  json j{{"link_threshold", link_threshold},
         {"retrieved_docs", retrieved_docs},
         {"sentences_per_edge", sentences_per_edge},
         {"top_k_train", top_k_train},
         {"top_k_eval", top_k_eval},
         {"prefilter_sentences", prefilter_sentences},
         {"model", json::parse(ResolvedModel().ToJson())},
         {"epochs", epochs},
         {"batch_size", batch_size},
         {"learning_rate", learning_rate},
         {"clip_norm", clip_norm},
         {"scorer_negatives", scorer_negatives},
         {"seed", seed},
         {"threads", threads}};
  return j.dump(2) + "\n";
}

PipelineConfig PipelineConfig::FromJson(const std::string &text, PipelineConfig base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception &e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("config: expected an object");
  PipelineConfig c = std::move(base);
  try {
    for (const auto &[key, value] : j.items()) {
      if (key == "link_threshold") {
        c.link_threshold = value.get<double>();
      } else if (key == "retrieved_docs") {
        c.retrieved_docs = value.get<size_t>();
      } else if (key == "sentences_per_edge") {
        c.sentences_per_edge = value.get<size_t>();
      } else if (key == "top_k_train") {
        c.top_k_train = value.get<size_t>();
      } else if (key == "top_k_eval") {
        c.top_k_eval = value.get<size_t>();
      } else if (key == "prefilter_sentences") {
        c.prefilter_sentences = value.get<size_t>();
      } else if (key == "epochs") {
        c.epochs = value.get<size_t>();
      } else if (key == "batch_size") {
        c.batch_size = value.get<size_t>();
      } else if (key == "learning_rate") {
        c.learning_rate = value.get<double>();
      } else if (key == "clip_norm") {
        c.clip_norm = value.get<double>();
      } else if (key == "scorer_negatives") {
        c.scorer_negatives = value.get<size_t>();
      } else if (key == "seed") {
        c.seed = value.get<uint64_t>();
      } else if (key == "threads") {
        c.threads = value.get<int>();
      } else if (key == "model") {
        json merged = json::parse(c.model.ToJson());
        merged.update(value);
        c.model = ModelConfig::FromJson(merged.dump());
      } else {
        throw ParseError("config: unknown key " + key);
      }
    }
  } catch (const json::exception &e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  return c;
}

PipelineConfig PipelineConfig::FromJson(const std::string &text) {
  return FromJson(text, PipelineConfig());
}

uint64_t PipelineConfig::Fingerprint() const {
  PipelineConfig c = *this;
  c.threads = 1;
  return ftqa::Fingerprint(c.ToJson());
}

Workspace::Workspace(Corpus corpus, const PipelineConfig &config)
    : corpus_(std::move(corpus)),
      linked_(LinkCorpus(corpus_, config.link_threshold, config.threads)),
      graph_(BuildGraph(corpus_, linked_)),
      index_(BuildDocumentIndex(corpus_)),
      scorer_(&index_) {}

Workspace::Workspace(Corpus corpus, FreeTextGraph graph, Index index,
                     const PipelineConfig &config)
    : corpus_(std::move(corpus)),
      linked_(LinkCorpus(corpus_, config.link_threshold, config.threads)),
      graph_(std::move(graph)),
      index_(std::move(index)),
      scorer_(&index_) {}

GroundedGraph Workspace::Ground(const Question &question, const GroundingOptions &options) const {
  GroundingContext ctx{&corpus_, &linked_, &graph_, &index_, &scorer_};
  return GroundQuestion(question, ctx, options);
}

std::vector<GroundedGraph> Workspace::GroundAll(const std::vector<Question> &questions,
                                                const GroundingOptions &options,
                                                int threads) const {
  std::vector<GroundedGraph> out(questions.size());
  ParallelFor(questions.size(), threads, [&](size_t i) { out[i] = Ground(questions[i], options); });
  return out;
}

LexicalEdgeScorer::Weights Workspace::TrainScorer(const std::vector<Question> &questions,
                                                  const PipelineConfig &config) {
  GroundingOptions options = config.Grounding(true);
  options.top_k = std::numeric_limits<size_t>::max();
  const std::vector<GroundedGraph> raw = GroundAll(questions, options, config.threads);
  const auto examples =
      SampleScorerExamples(raw, scorer_, config.scorer_negatives, DeriveSeed(config.seed, "scorer"));
  const LexicalEdgeScorer::Weights weights = FitScorer(examples);
  scorer_.set_weights(weights);
  return weights;
}

GroundedGraph ToyGroundedGraph() {
  auto sentence = [](std::string text, std::string doc) {
    return EvidenceSentence{std::move(text), std::move(doc), Provenance::kExternal};
  };
  GroundedGraph g;
  g.question_id = "toy";
  g.question_text = "Which weaver traded with Orlan and studied under Besk?";
  g.question_entities = {"Orlan", "Besk"};
  g.candidates = {"Cado", "Dremm", "Ferro"};
  g.glosses = {{"Orlan", "Orlan was a merchant of the river towns."},
               {"Besk", "Besk was a master weaver."},
               {"Cado", "Cado was a weaver from the hills."},
               {"Dremm", "Dremm was a sailor."},
               {"Ferro", "Ferro was a weaver and dyer."}};
  g.edges = {
      {"Besk", "Cado", {sentence("Cado studied under Besk for a decade.", "d1")}},
      {"Besk", "Ferro",
       {sentence("Ferro met Besk once.", "d2"), sentence("Besk praised Ferro.", "d3")}},
      {"Orlan", "Cado",
       {sentence("Cado traded with Orlan every spring.", "d1"),
        sentence("Orlan bought cloth from Cado.", "d4")}},
      {"Orlan", "Dremm", {sentence("Dremm sailed for Orlan.", "d5")}},
  };
  g.answer_entity_id = "Cado";
  g.candidates_before_pruning = 3;
  g.answer_in_all_candidates = true;
  g.answer_kept = true;
  return g;
}

ModelConfig ToyModelConfig() {
  ModelConfig m;
  m.embed_dim = 8;
  m.rnn_hidden = 8;
  m.ffn_dim = 8;
  m.mlp_dims = {8};
  m.layers = 3;
  return m;
}

std::vector<Prediction> ToPredictions(const std::vector<ForwardTrace> &traces) {
  std::vector<Prediction> out;
  out.reserve(traces.size());
  for (const ForwardTrace &t : traces) out.push_back({t.question_id, t.answer});
  return out;
}

Experiment TrainAndEvaluate(const std::vector<GroundedGraph> &train,
                            const std::vector<GroundedGraph> &test, const PipelineConfig &config,
                            std::unique_ptr<DelftModel> *model_out) {
  config.Validate();
  auto model = std::make_unique<DelftModel>(config.ResolvedModel(), TokenVocabulary::Build(train));
  Experiment e;
  e.training = Train(*model, train, config.Training());
  e.predictions = ToPredictions(PredictAll(*model, test, config.threads));
  e.metrics = Evaluate(test, e.predictions, config.Fingerprint(), config.seed);
  if (model_out) *model_out = std::move(model);
  return e;
}

}  // namespace ftqa
