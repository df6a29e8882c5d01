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

// ftqa: command line front end for the question answering pipeline.
//
//   ftqa synth        --out DIR
//   ftqa ingest       --documents F --entities F --out DIR
//   ftqa build-graph  --documents F --entities F --out DIR
//   ftqa train-scorer --documents F --entities F --questions F --out FILE
//   ftqa ground       --documents F --entities F --questions F --out DIR
//   ftqa train        --grounded DIR --out DIR
//   ftqa evaluate     --checkpoint F --grounded DIR --out DIR
//   ftqa answer       --checkpoint F --documents F --entities F --question TEXT
//   ftqa trace        --checkpoint F --grounded FILE --out PREFIX
//   ftqa gradcheck
//
// Every command accepts --config FILE (a JSON object of pipeline settings)
// plus flags for the same settings; flags win over the file, the file wins
// over defaults. The resolved settings are written next to the outputs.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ftqa/corpus.h"
#include "ftqa/error.h"
#include "ftqa/eval.h"
#include "ftqa/ftkg.h"
#include "ftqa/grounding.h"
#include "ftqa/index.h"
#include "ftqa/model.h"
#include "ftqa/pipeline.h"
#include "ftqa/synth.h"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace ftqa {
namespace {

// Pipeline settings as they arrive from the command line. Unset flags leave
// the file or default value alone.
struct SettingFlags {
  std::string config_path;
  std::optional<double> link_threshold;
  std::optional<size_t> retrieved_docs;
  std::optional<size_t> sentences_per_edge;
  std::optional<size_t> top_k_train;
  std::optional<size_t> top_k_eval;
  std::optional<size_t> prefilter_sentences;
  std::optional<size_t> embed_dim;
  std::optional<size_t> rnn_hidden;
  std::optional<size_t> ffn_dim;
  std::vector<size_t> mlp_dims;
  std::optional<size_t> layers;
  std::optional<std::string> embeddings;
  std::vector<std::string> ablate;
  std::optional<size_t> epochs;
  std::optional<size_t> batch_size;
  std::optional<double> learning_rate;
  std::optional<size_t> scorer_negatives;
  std::optional<uint64_t> seed;
  std::optional<int> threads;

  void Register(CLI::App *app) {
    app->add_option("--config", config_path, "JSON file of pipeline settings");
    app->add_option("--link-threshold", link_threshold, "Entity linking confidence threshold");
    app->add_option("--retrieved-docs", retrieved_docs, "Documents retrieved per question");
    app->add_option("--sentences-per-edge", sentences_per_edge, "Sentences kept per edge");
    app->add_option("--top-k-train", top_k_train, "Candidates kept when grounding for training");
    app->add_option("--top-k-eval", top_k_eval, "Candidates kept when grounding for evaluation");
    app->add_option("--prefilter-sentences", prefilter_sentences,
                    "Edge sentences kept per question before node scoring");
    app->add_option("--embed-dim", embed_dim, "Word embedding width");
    app->add_option("--rnn-hidden", rnn_hidden, "Recurrent state width per direction");
    app->add_option("--ffn-dim", ffn_dim, "Hidden width of the feed-forward blocks");
    app->add_option("--mlp-dims", mlp_dims, "Hidden widths of the answer scorer")->delimiter(',');
    app->add_option("--layers", layers, "Graph update layers");
    app->add_option("--embeddings", embeddings, "Pretrained word vectors (text format)");
    app->add_option("--ablate", ablate,
                    "no-gloss|no-edge-sentences|no-edge-importance|no-self-attention|"
                    "collapse-structure (repeatable)")
        ->delimiter(',');
    app->add_option("--epochs", epochs, "Training epochs");
    app->add_option("--batch-size", batch_size, "Questions per optimizer step");
    app->add_option("--learning-rate", learning_rate, "Optimizer step size");
    app->add_option("--scorer-negatives", scorer_negatives,
                    "Negative sentences sampled per question for the edge scorer");
    app->add_option("--seed", seed, "Run seed");
    app->add_option("--threads", threads, "Worker threads; 1 is bit-deterministic");
  }

  PipelineConfig Resolve() const {
    PipelineConfig c;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw Error("--config: cannot open " + config_path);
      std::stringstream ss;
      ss << in.rdbuf();
      c = PipelineConfig::FromJson(ss.str());
    }
    if (link_threshold) c.link_threshold = *link_threshold;
    if (retrieved_docs) c.retrieved_docs = *retrieved_docs;
    if (sentences_per_edge) c.sentences_per_edge = *sentences_per_edge;
    if (top_k_train) c.top_k_train = *top_k_train;
    if (top_k_eval) c.top_k_eval = *top_k_eval;
    if (prefilter_sentences) c.prefilter_sentences = *prefilter_sentences;
    if (embed_dim) c.model.embed_dim = *embed_dim;
    if (rnn_hidden) c.model.rnn_hidden = *rnn_hidden;
    if (ffn_dim) c.model.ffn_dim = *ffn_dim;
    if (!mlp_dims.empty()) c.model.mlp_dims = mlp_dims;
    if (layers) c.model.layers = *layers;
    if (embeddings) c.model.embeddings_path = *embeddings;
    if (!ablate.empty()) {
      c.model.ablation = {};
      for (const std::string &a : ablate) {
        try {
          EnableAblation(c.model.ablation, a);
        } catch (const Error &e) {
          throw Error(std::string("--ablate: ") + e.what());
        }
      }
    }
    if (epochs) c.epochs = *epochs;
    if (batch_size) c.batch_size = *batch_size;
    if (learning_rate) c.learning_rate = *learning_rate;
    if (scorer_negatives) c.scorer_negatives = *scorer_negatives;
    if (seed) c.seed = *seed;
    if (threads) c.threads = *threads;
    c.Validate();
    return c;
  }
};

struct CorpusFlags {
  std::string documents;
  std::string entities;
  void Register(CLI::App *app) {
    app->add_option("--documents", documents, "documents.jsonl")->required();
    app->add_option("--entities", entities, "entities.jsonl")->required();
  }
};

void WriteText(const fs::path &path, const std::string &text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
}

void EchoConfig(const fs::path &dir, const PipelineConfig &config) {
  WriteText(dir / "config.json", config.ToJson());
}

// Builds the corpus workspace, reusing a graph cache when given.
std::unique_ptr<Workspace> OpenWorkspace(const CorpusFlags &flags, const PipelineConfig &config,
                                         const std::string &graph_cache) {
  Corpus corpus = LoadCorpus(flags.documents, flags.entities);
  if (graph_cache.empty()) return std::make_unique<Workspace>(std::move(corpus), config);
  const fs::path dir(graph_cache);
  return std::make_unique<Workspace>(std::move(corpus), LoadGraph((dir / "graph.bin").string()),
                                     Index::Load((dir / "index.bin").string()), config);
}

void LoadScorer(Workspace &ws, const std::string &path) {
  if (!path.empty()) ws.set_scorer_weights(LexicalEdgeScorer::LoadWeights(path));
}

int RunSynth(const PipelineConfig &config, const SyntheticSpec &spec, const std::string &out) {
  const SyntheticDataset data = GenerateSynthetic(spec, config.seed);
  WriteSynthetic(data, out);
  json echo{{"entities", spec.entities},
            {"facts_per_entity", spec.facts_per_entity},
            {"second_relation_rate", spec.second_relation_rate},
            {"train_questions", spec.train_questions},
            {"test_questions", spec.test_questions},
            {"distractor_density", spec.distractor_density},
            {"hops", spec.hops},
            {"seed", config.seed}};
  WriteText(fs::path(out) / "synth.json", echo.dump(2) + "\n");
  std::cout << "wrote " << data.documents.size() << " documents, " << data.entities.size()
            << " entities, " << data.train.size() << " train and " << data.test.size()
            << " test questions to " << out << "\n";
  return 0;
}

int RunIngest(const PipelineConfig &config, const CorpusFlags &corpus_flags,
              const std::string &out) {
  const Corpus corpus = LoadCorpus(corpus_flags.documents, corpus_flags.entities);
  const fs::path dir(out);
  fs::create_directories(dir);
  WriteDocuments((dir / "documents.jsonl").string(), corpus.documents());
  WriteEntities((dir / "entities.jsonl").string(), corpus.entities());
  const LinkedCorpus linked = LinkCorpus(corpus, config.link_threshold, config.threads);
  std::ofstream sentences(dir / "sentences.jsonl", std::ios::trunc);
  std::ofstream mentions(dir / "mentions.jsonl", std::ios::trunc);
  size_t sentence_count = 0, mention_count = 0;
  for (size_t d = 0; d < corpus.documents().size(); ++d) {
    const Document &doc = corpus.documents()[d];
    for (size_t s = 0; s < doc.sentences.size(); ++s) {
      sentences << json{{"doc_id", doc.doc_id},
                        {"sentence_index", s},
                        {"span", {doc.sentences[s].span.begin, doc.sentences[s].span.end}},
                        {"text", doc.sentences[s].text}}
                       .dump()
                << "\n";
      ++sentence_count;
      for (const Mention &m : linked[d][s]) {
        mentions << json{{"entity_id", m.entity_id},
                         {"doc_id", m.doc_id},
                         {"sentence_index", m.sentence_index},
                         {"char_span", {m.char_span.begin, m.char_span.end}},
                         {"confidence", m.confidence}}
                        .dump()
                 << "\n";
        ++mention_count;
      }
    }
  }
  EchoConfig(dir, config);
  std::cout << corpus.documents().size() << " documents, " << corpus.entities().size()
            << " entities, " << sentence_count << " sentences, " << mention_count
            << " mentions\n";
  return 0;
}

int RunBuildGraph(const PipelineConfig &config, const CorpusFlags &corpus_flags,
                  const std::string &out) {
  const Corpus corpus = LoadCorpus(corpus_flags.documents, corpus_flags.entities);
  const FreeTextGraph graph = BuildGraph(corpus, config.link_threshold, config.threads);
  const fs::path dir(out);
  fs::create_directories(dir);
  SaveGraph(graph, (dir / "graph.bin").string());
  WriteGraphJsonl(graph, (dir / "nodes.jsonl").string(), (dir / "edges.jsonl").string());
  BuildDocumentIndex(corpus).Save((dir / "index.bin").string());
  EchoConfig(dir, config);
  std::cout << graph.nodes().size() << " nodes, " << graph.edges().size() << " edges\n";
  return 0;
}

int RunTrainScorer(const PipelineConfig &config, const CorpusFlags &corpus_flags,
                   const std::string &graph_cache, const std::string &questions,
                   const std::string &out) {
  auto ws = OpenWorkspace(corpus_flags, config, graph_cache);
  ws->TrainScorer(ReadQuestions(questions), config);
  const fs::path path(out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  ws->scorer().Save(out);
  WriteText(fs::path(out + ".config.json"), config.ToJson());
  const auto &w = ws->scorer().weights();
  std::printf("scorer weights %.6f %.6f %.6f bias %.6f\n", w.w[0], w.w[1], w.w[2], w.bias);
  return 0;
}

int RunGround(const PipelineConfig &config, const CorpusFlags &corpus_flags,
              const std::string &graph_cache, const std::string &scorer,
              const std::string &questions, const std::string &split, const std::string &out) {
  if (split != "train" && split != "eval") throw Error("--split must be train or eval");
  auto ws = OpenWorkspace(corpus_flags, config, graph_cache);
  LoadScorer(*ws, scorer);
  const std::vector<GroundedGraph> graphs =
      ws->GroundAll(ReadQuestions(questions), config.Grounding(split == "train"), config.threads);
  size_t excluded = 0;
  for (const GroundedGraph &g : graphs) {
    WriteGroundedGraph(g, out);
    excluded += g.excluded;
  }
  EchoConfig(out, config);
  const RecallPair recall = RecallMetrics(graphs);
  std::printf("grounded %zu questions (%zu excluded); answer recall %.4f all, %.4f kept\n",
              graphs.size(), excluded, recall.all_candidates, recall.after_filtering);
  return 0;
}

int RunTrain(const PipelineConfig &config, const std::string &grounded, const std::string &out) {
  const std::vector<GroundedGraph> graphs = ReadGroundedDir(grounded);
  DelftModel model(config.ResolvedModel(), TokenVocabulary::Build(graphs));
  TrainOptions options = config.Training();
  options.checkpoint_dir = out;
  fs::create_directories(out);
  EchoConfig(out, config);
  std::ofstream curve(fs::path(out) / "loss.jsonl", std::ios::trunc);
  const TrainResult result = Train(model, graphs, options, [&](const EpochStats &s) {
    curve << json{{"epoch", s.epoch}, {"loss", s.mean_loss}, {"train_accuracy", s.train_accuracy}}
                 .dump()
          << "\n";
    curve.flush();
    std::printf("epoch %zu loss %.6f train exact match %.4f (%.1fs)\n", s.epoch, s.mean_loss,
                s.train_accuracy, s.seconds);
    std::fflush(stdout);
  });
  std::printf("trained on %zu questions, skipped %zu; checkpoint %s\n", result.used_questions,
              result.skipped_questions, (fs::path(out) / "model.ckpt").string().c_str());
  return 0;
}

int RunEvaluate(const PipelineConfig &config, const std::string &checkpoint,
                const std::string &grounded, const std::string &out) {
  const DelftModel model = DelftModel::Load(checkpoint);
  const std::vector<GroundedGraph> graphs = ReadGroundedDir(grounded);
  const std::vector<ForwardTrace> traces = PredictAll(model, graphs, config.threads);
  const std::vector<Prediction> predictions = ToPredictions(traces);
  // The fingerprint covers the settings the checkpoint was trained with.
  PipelineConfig effective = config;
  effective.model = model.config();
  effective.seed = model.config().seed;
  const MetricsReport report =
      Evaluate(graphs, predictions, effective.Fingerprint(), effective.seed);
  const fs::path dir(out);
  fs::create_directories(dir);
  WriteText(dir / "metrics.json", report.ToJson());
  std::ostringstream lines;
  for (const Prediction &p : predictions) {
    lines << json{{"question_id", p.question_id},
                  {"answer", p.answer ? json(*p.answer) : json(nullptr)}}
                 .dump()
          << "\n";
  }
  WriteText(dir / "predictions.jsonl", lines.str());
  EchoConfig(dir, effective);
  std::printf("accuracy %.4f over %zu questions (%zu excluded)\n", report.accuracy,
              report.evaluated, report.excluded);
  return 0;
}

int RunAnswer(const PipelineConfig &config, const CorpusFlags &corpus_flags,
              const std::string &graph_cache, const std::string &scorer,
              const std::string &checkpoint, const std::string &text, const std::string &out) {
  auto ws = OpenWorkspace(corpus_flags, config, graph_cache);
  LoadScorer(*ws, scorer);
  Question question{"query", text, std::nullopt};
  const GroundedGraph graph = ws->Ground(question, config.Grounding(false));
  if (graph.excluded) {
    std::cout << "unanswerable: no question entities\n";
    return 0;
  }
  if (graph.candidates.empty()) {
    std::cout << "no answer: no candidate entities\n";
    return 0;
  }
  const DelftModel model = DelftModel::Load(checkpoint);
  const ForwardTrace trace = model.Predict(graph);
  if (!out.empty()) {
    WriteText(out + ".json", trace.ToJson() + "\n");
    WriteText(out + ".dot", trace.ToDot());
  }
  double best = 0.0;
  for (size_t i = 0; i < trace.candidates.size(); ++i) {
    if (trace.candidates[i] == *trace.answer) best = trace.probabilities[i];
  }
  std::printf("%s\t%.6f\n", trace.answer->c_str(), best);
  return 0;
}

int RunTrace(const std::string &checkpoint, const std::string &grounded, const std::string &out) {
  const DelftModel model = DelftModel::Load(checkpoint);
  const GroundedGraph graph = ReadGroundedGraph(grounded);
  if (graph.excluded) {
    std::cout << "unanswerable: no question entities\n";
    return 0;
  }
  const ForwardTrace trace = model.Predict(graph);
  WriteText(out + ".json", trace.ToJson() + "\n");
  WriteText(out + ".dot", trace.ToDot());
  std::printf("answer %s; wrote %s.json and %s.dot\n",
              trace.answer ? trace.answer->c_str() : "(none)", out.c_str(), out.c_str());
  return 0;
}

int RunGradCheck(const PipelineConfig &config, double epsilon, double tolerance) {
  ModelConfig model_config = ToyModelConfig();
  model_config.ablation = config.model.ablation;
  model_config.seed = config.seed;
  const GroundedGraph graph = ToyGroundedGraph();
  const DelftModel model(model_config, TokenVocabulary::Build({graph}));
  const nn::GradCheckReport report = CheckModelGradients(model, graph, epsilon, tolerance);
  for (const nn::GradCheckEntry &e : report.entries) {
    std::printf("%-36s %6zu values  max rel err %.3e\n", e.name.c_str(), e.checked,
                e.max_relative_error);
  }
  std::printf("%s: max relative error %.3e (tolerance %.1e)\n", report.passed ? "PASS" : "FAIL",
              report.max_relative_error, report.tolerance);
  return report.passed ? 0 : 1;
}

int Main(int argc, char **argv) {
  CLI::App app{"Factoid question answering over a free-text entity graph"};
  app.require_subcommand(1);
  app.fallthrough();

  SettingFlags settings;
  CorpusFlags corpus_flags;
  std::string out, questions, grounded, checkpoint, scorer, graph_cache, question_text;
  std::string split = "eval";
  double epsilon = 1e-5, tolerance = 1e-4;
  SyntheticSpec spec;

  auto *synth = app.add_subcommand("synth", "Generate a synthetic benchmark");
  synth->add_option("--out", out, "Output directory")->required();
  synth->add_option("--entities", spec.entities, "Number of entities");
  synth->add_option("--facts-per-entity", spec.facts_per_entity, "Facts per entity");
  synth->add_option("--second-relation-rate", spec.second_relation_rate,
                    "Chance a related pair holds a second relation");
  synth->add_option("--train-questions", spec.train_questions, "Training questions");
  synth->add_option("--test-questions", spec.test_questions, "Test questions");
  synth->add_option("--distractor-density", spec.distractor_density,
                    "Unrelated co-occurrence sentences per fact");
  synth->add_option("--hops", spec.hops, "Facts needed per question (1-3)");

  auto *ingest = app.add_subcommand("ingest", "Load, split and link a corpus");
  corpus_flags.Register(ingest);
  ingest->add_option("--out", out, "Output directory")->required();

  auto *build = app.add_subcommand("build-graph", "Build the entity graph and retrieval index");
  corpus_flags.Register(build);
  build->add_option("--out", out, "Output directory")->required();

  auto *train_scorer = app.add_subcommand("train-scorer", "Fit the lexical edge scorer");
  corpus_flags.Register(train_scorer);
  train_scorer->add_option("--graph", graph_cache, "Directory written by build-graph");
  train_scorer->add_option("--questions", questions, "questions.jsonl")->required();
  train_scorer->add_option("--out", out, "Scorer weights file")->required();

  auto *ground = app.add_subcommand("ground", "Ground questions into evidence graphs");
  corpus_flags.Register(ground);
  ground->add_option("--graph", graph_cache, "Directory written by build-graph");
  ground->add_option("--scorer", scorer, "Scorer weights from train-scorer");
  ground->add_option("--questions", questions, "questions.jsonl")->required();
  ground->add_option("--split", split, "train (top-k-train) or eval (top-k-eval)");
  ground->add_option("--out", out, "Directory of grounded graphs")->required();

  auto *train = app.add_subcommand("train", "Train the answer selection model");
  train->add_option("--grounded", grounded, "Directory of grounded training graphs")->required();
  train->add_option("--out", out, "Checkpoint directory")->required();

  auto *evaluate = app.add_subcommand("evaluate", "Score a checkpoint on grounded graphs");
  evaluate->add_option("--checkpoint", checkpoint, "Model checkpoint")->required();
  evaluate->add_option("--grounded", grounded, "Directory of grounded graphs")->required();
  evaluate->add_option("--out", out, "Output directory for metrics.json")->required();

  auto *answer = app.add_subcommand("answer", "Answer one question");
  corpus_flags.Register(answer);
  answer->add_option("--graph", graph_cache, "Directory written by build-graph");
  answer->add_option("--scorer", scorer, "Scorer weights from train-scorer");
  answer->add_option("--checkpoint", checkpoint, "Model checkpoint")->required();
  answer->add_option("--question", question_text, "Question text")->required();
  answer->add_option("--trace-out", out, "Also write PREFIX.json and PREFIX.dot");

  auto *trace = app.add_subcommand("trace", "Export edge weights for one grounded graph");
  trace->add_option("--checkpoint", checkpoint, "Model checkpoint")->required();
  trace->add_option("--grounded", grounded, "One grounded graph JSON file")->required();
  trace->add_option("--out", out, "Output prefix")->required();

  auto *gradcheck = app.add_subcommand("gradcheck", "Finite-difference check of the model");
  gradcheck->add_option("--epsilon", epsilon, "Central difference step");
  gradcheck->add_option("--tolerance", tolerance, "Maximum relative error");

  for (CLI::App *sub : app.get_subcommands({})) settings.Register(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e);
  }

  try {
    const PipelineConfig config = settings.Resolve();
    if (*synth) {
      spec.Validate();
      return RunSynth(config, spec, out);
    }
    if (*ingest) return RunIngest(config, corpus_flags, out);
    if (*build) return RunBuildGraph(config, corpus_flags, out);
    if (*train_scorer) return RunTrainScorer(config, corpus_flags, graph_cache, questions, out);
    if (*ground) {
      return RunGround(config, corpus_flags, graph_cache, scorer, questions, split, out);
    }
    if (*train) return RunTrain(config, grounded, out);
    if (*evaluate) return RunEvaluate(config, checkpoint, grounded, out);
    if (*answer) {
      return RunAnswer(config, corpus_flags, graph_cache, scorer, checkpoint, question_text, out);
    }
    if (*trace) return RunTrace(checkpoint, grounded, out);
    if (*gradcheck) return RunGradCheck(config, epsilon, tolerance);
  } catch (const std::exception &e) {
    std::cerr << "ftqa: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace
}  // namespace ftqa

int main(int argc, char **argv) { return ftqa::Main(argc, argv); }
