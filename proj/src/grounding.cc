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

#include "ftqa/grounding.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "ftqa/error.h"
#include "ftqa/random.h"

namespace ftqa {

using json = nlohmann::json;

std::vector<const GroundedEdge *> GroundedGraph::EdgesOf(std::string_view candidate) const {
  std::vector<const GroundedEdge *> out;
  for (const GroundedEdge &e : edges) {
    if (e.candidate == candidate) out.push_back(&e);
  }
  return out;
}

std::array<double, LexicalEdgeScorer::kFeatures> LexicalEdgeScorer::Features(
    std::string_view question, std::string_view sentence, std::string_view gloss) const {
  std::array<double, kFeatures> f{};
  const SparseVector q = index_->Vectorize(question);
  f[0] = Index::Cosine(q, index_->Vectorize(sentence));
  std::set<std::string> q_terms;
  for (std::string &t : IndexTokens(question)) q_terms.insert(std::move(t));
  if (!q_terms.empty()) {
    std::set<std::string> s_terms;
    for (std::string &t : IndexTokens(sentence)) s_terms.insert(std::move(t));
    size_t shared = 0;
    for (const std::string &t : q_terms) shared += s_terms.count(t);
    f[1] = static_cast<double>(shared) / static_cast<double>(q_terms.size());
  }
  f[2] = Index::Cosine(q, index_->Vectorize(gloss));
  return f;
}

double LexicalEdgeScorer::ScoreFeatures(const std::array<double, kFeatures> &features) const {
  double z = weights_.bias;
  for (size_t i = 0; i < kFeatures; ++i) z += weights_.w[i] * features[i];
  return 1.0 / (1.0 + std::exp(-z));
}

double LexicalEdgeScorer::Score(std::string_view question, std::string_view sentence,
                                std::string_view gloss) const {
  return ScoreFeatures(Features(question, sentence, gloss));
}

void LexicalEdgeScorer::Save(const std::string &path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open " + path + " for writing");
  json j{{"weights", weights_.w}, {"bias", weights_.bias},
         {"features", {"question_sentence_cosine", "question_term_overlap",
                       "question_gloss_cosine"}}};
  out << j.dump(2) << '\n';
}

LexicalEdgeScorer::Weights LexicalEdgeScorer::LoadWeights(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  try {
    json j = json::parse(in);
    Weights w;
    auto arr = j.at("weights").get<std::vector<double>>();
    if (arr.size() != kFeatures) throw ParseError(path + ": expected 3 weights");
    std::copy(arr.begin(), arr.end(), w.w.begin());
    w.bias = j.at("bias").get<double>();
    return w;
  } catch (const json::exception &e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::vector<ScorerExample> SampleScorerExamples(const std::vector<GroundedGraph> &graphs,
                                                const LexicalEdgeScorer &scorer,
                                                size_t negatives, uint64_t seed) {
  Rng rng(seed, "scorer-sampling");
  std::vector<ScorerExample> examples;
  for (const GroundedGraph &g : graphs) {
    if (!g.answer_entity_id) continue;
    struct Ref {
      const GroundedEdge *edge;
      size_t sentence;
    };
    std::vector<Ref> pos, neg;
    for (const GroundedEdge &e : g.edges) {
      for (size_t s = 0; s < e.sentences.size(); ++s) {
        (e.candidate == *g.answer_entity_id ? pos : neg).push_back({&e, s});
      }
    }
    if (pos.empty()) continue;
    auto add = [&](const Ref &r, double label) {
      auto gloss = g.glosses.find(r.edge->candidate);
      ScorerExample ex;
      ex.features = scorer.Features(g.question_text, r.edge->sentences[r.sentence].text,
                                    gloss == g.glosses.end() ? "" : gloss->second);
      ex.label = label;
      examples.push_back(ex);
    };
    add(pos[rng.Below(pos.size())], 1.0);
    rng.Shuffle(neg);
    for (size_t i = 0; i < std::min(negatives, neg.size()); ++i) add(neg[i], 0.0);
  }
  return examples;
}

LexicalEdgeScorer::Weights FitScorer(const std::vector<ScorerExample> &examples, double l2) {
  constexpr size_t F = LexicalEdgeScorer::kFeatures;
  constexpr size_t P = F + 1;  // weights then bias
  double n_pos = 0, n_neg = 0;
  for (const ScorerExample &ex : examples) (ex.label > 0.5 ? n_pos : n_neg) += 1.0;
  if (n_pos == 0) throw Error("cannot fit the edge scorer: no positive examples");
  // Each class carries half the total weight.
  const double w_pos = 0.5 / n_pos;
  const double w_neg = n_neg > 0 ? 0.5 / n_neg : 0.0;

  std::array<double, P> theta{};
  for (int iter = 0; iter < 100; ++iter) {
    std::array<double, P> grad{};
    std::array<std::array<double, P>, P> hess{};
    for (const ScorerExample &ex : examples) {
      std::array<double, P> x{};
      std::copy(ex.features.begin(), ex.features.end(), x.begin());
      x[F] = 1.0;
      double z = 0.0;
      for (size_t i = 0; i < P; ++i) z += theta[i] * x[i];
      const double p = 1.0 / (1.0 + std::exp(-z));
      const double w = ex.label > 0.5 ? w_pos : w_neg;
      for (size_t i = 0; i < P; ++i) {
        grad[i] += w * (p - ex.label) * x[i];
        for (size_t j = 0; j < P; ++j) hess[i][j] += w * p * (1.0 - p) * x[i] * x[j];
      }
    }
    for (size_t i = 0; i < F; ++i) {
      grad[i] += l2 * theta[i];
      hess[i][i] += l2;
    }
    hess[F][F] += 1e-12;
    // Solve hess * step = grad by Gaussian elimination with partial pivoting.
    std::array<double, P> step = grad;
    for (size_t c = 0; c < P; ++c) {
      size_t pivot = c;
      for (size_t r = c + 1; r < P; ++r) {
        if (std::abs(hess[r][c]) > std::abs(hess[pivot][c])) pivot = r;
      }
      std::swap(hess[c], hess[pivot]);
      std::swap(step[c], step[pivot]);
      if (std::abs(hess[c][c]) < 1e-300) continue;
      for (size_t r = c + 1; r < P; ++r) {
        const double f = hess[r][c] / hess[c][c];
        for (size_t k = c; k < P; ++k) hess[r][k] -= f * hess[c][k];
        step[r] -= f * step[c];
      }
    }
    for (size_t c = P; c-- > 0;) {
      double v = step[c];
      for (size_t k = c + 1; k < P; ++k) v -= hess[c][k] * step[k];
      step[c] = std::abs(hess[c][c]) < 1e-300 ? 0.0 : v / hess[c][c];
    }
    double change = 0.0;
    for (size_t i = 0; i < P; ++i) {
      theta[i] -= step[i];
      change = std::max(change, std::abs(step[i]));
    }
    if (change < 1e-12) break;
  }
  LexicalEdgeScorer::Weights w;
  std::copy(theta.begin(), theta.begin() + F, w.w.begin());
  w.bias = theta[F];
  return w;
}

Index BuildDocumentIndex(const Corpus &corpus) {
  std::vector<std::string> texts, ids;
  for (const Document &d : corpus.documents()) {
    texts.push_back(d.text);
    ids.push_back(d.doc_id);
  }
  if (texts.empty()) {
    texts.emplace_back();
    ids.emplace_back();
  }
  return Index(texts, ids);
}

std::vector<std::string> ExtractQuestionEntities(std::string_view question,
                                                 const Corpus &corpus, double threshold) {
  std::vector<std::string> out;
  for (const Mention &m : corpus.LinkText(question, threshold)) {
    if (std::find(out.begin(), out.end(), m.entity_id) == out.end()) out.push_back(m.entity_id);
  }
  return out;
}

std::vector<std::string> GenerateCandidates(const std::vector<std::string> &question_entities,
                                            std::string_view question,
                                            const GroundingContext &context,
                                            size_t retrieved_docs) {
  const Corpus &corpus = *context.corpus;
  std::set<std::string> found;
  auto add_document = [&](size_t doc_index) {
    const Document &d = corpus.documents()[doc_index];
    if (d.entity_id) found.insert(*d.entity_id);
    for (const auto &sentence : (*context.linked)[doc_index]) {
      for (const Mention &m : sentence) found.insert(m.entity_id);
    }
  };
  for (const std::string &q : question_entities) {
    if (const Document *page = corpus.PageOf(q)) {
      const size_t di = corpus.DocumentIndex(page->doc_id);
      for (const auto &sentence : (*context.linked)[di]) {
        for (const Mention &m : sentence) found.insert(m.entity_id);
      }
    }
  }
  if (retrieved_docs > 0 && !corpus.documents().empty()) {
    for (const ScoredUnit &hit : context.index->Retrieve(question, retrieved_docs)) {
      add_document(hit.unit);
    }
  }
  for (const std::string &q : question_entities) found.erase(q);
  return {found.begin(), found.end()};
}

GroundedGraph AttachEvidenceEdges(const std::vector<std::string> &question_entities,
                                  const std::vector<std::string> &candidates,
                                  const FreeTextGraph &graph) {
  GroundedGraph g;
  g.question_entities = question_entities;
  for (const std::string &a : candidates) {
    bool connected = false;
    for (const std::string &q : question_entities) {
      if (q == a) continue;
      if (const GraphEdge *e = graph.FindEdge(q, a)) {
        g.edges.push_back({q, a, e->sentences});
        connected = true;
      }
    }
    if (connected) g.candidates.push_back(a);
  }
  std::sort(g.candidates.begin(), g.candidates.end());
  std::sort(g.edges.begin(), g.edges.end(), [](const GroundedEdge &x, const GroundedEdge &y) {
    return std::tie(x.question_entity, x.candidate) < std::tie(y.question_entity, y.candidate);
  });
  for (const std::string &id : question_entities) {
    const GraphNode *n = graph.FindNode(id);
    g.glosses[id] = n ? n->gloss : "";
  }
  for (const std::string &id : g.candidates) {
    const GraphNode *n = graph.FindNode(id);
    g.glosses[id] = n ? n->gloss : "";
  }
  return g;
}

namespace {

// Drops candidates without edges and glosses of removed nodes; refreshes
// the answer flag.
void Compact(GroundedGraph &g) {
  std::set<std::string> connected;
  for (const GroundedEdge &e : g.edges) connected.insert(e.candidate);
  std::erase_if(g.candidates, [&](const std::string &c) { return !connected.count(c); });
  std::set<std::string> keep(g.question_entities.begin(), g.question_entities.end());
  keep.insert(g.candidates.begin(), g.candidates.end());
  std::erase_if(g.glosses, [&](const auto &kv) { return !keep.count(kv.first); });
  g.answer_kept = g.answer_entity_id &&
                  std::binary_search(g.candidates.begin(), g.candidates.end(), *g.answer_entity_id);
}

}  // namespace

void PrefilterSentences(GroundedGraph &graph, const Index &index, size_t limit) {
  struct Item {
    double score;
    size_t edge, sentence;
  };
  std::vector<Item> items;
  const SparseVector q = index.Vectorize(graph.question_text);
  for (size_t e = 0; e < graph.edges.size(); ++e) {
    for (size_t s = 0; s < graph.edges[e].sentences.size(); ++s) {
      items.push_back({Index::Cosine(q, index.Vectorize(graph.edges[e].sentences[s].text)), e, s});
    }
  }
  if (items.size() <= limit) return;
  std::sort(items.begin(), items.end(), [](const Item &x, const Item &y) {
    return RanksBefore(x.score, std::tie(x.edge, x.sentence), y.score,
                       std::tie(y.edge, y.sentence));
  });
  items.resize(limit);
  std::vector<std::vector<bool>> kept(graph.edges.size());
  for (size_t e = 0; e < graph.edges.size(); ++e) kept[e].assign(graph.edges[e].sentences.size(), false);
  for (const Item &it : items) kept[it.edge][it.sentence] = true;
  std::vector<GroundedEdge> edges;
  for (size_t e = 0; e < graph.edges.size(); ++e) {
    GroundedEdge edge{graph.edges[e].question_entity, graph.edges[e].candidate, {}};
    for (size_t s = 0; s < kept[e].size(); ++s) {
      if (kept[e][s]) edge.sentences.push_back(graph.edges[e].sentences[s]);
    }
    if (!edge.sentences.empty()) edges.push_back(std::move(edge));
  }
  graph.edges = std::move(edges);
  Compact(graph);
}

void ScoreAndPruneNodes(GroundedGraph &graph, const EdgeScorer &scorer, size_t k) {
  if (k == 0) throw Error("top-k node budget must be at least 1");
  std::vector<NodeScore> scores;
  for (const std::string &c : graph.candidates) {
    NodeScore ns;
    ns.candidate = c;
    ns.score = -1.0;
    const auto gloss = graph.glosses.find(c);
    const std::string_view gloss_text = gloss == graph.glosses.end() ? "" : gloss->second;
    for (const GroundedEdge *e : graph.EdgesOf(c)) {
      for (const EvidenceSentence &s : e->sentences) {
        const double v = scorer.Score(graph.question_text, s.text, gloss_text);
        if (v > ns.score) {
          ns.score = v;
          ns.best_question_entity = e->question_entity;
          ns.best_sentence = s.text;
        }
      }
    }
    ns.score = std::max(ns.score, 0.0);
    scores.push_back(std::move(ns));
  }
  std::sort(scores.begin(), scores.end(), [](const NodeScore &x, const NodeScore &y) {
    return RanksBefore(x.score, x.candidate, y.score, y.candidate);
  });
  if (scores.size() > k) scores.resize(k);
  std::set<std::string> keep;
  for (const NodeScore &s : scores) keep.insert(s.candidate);
  std::erase_if(graph.edges, [&](const GroundedEdge &e) { return !keep.count(e.candidate); });
  std::erase_if(graph.candidates, [&](const std::string &c) { return !keep.count(c); });
  graph.node_scores = std::move(scores);
  Compact(graph);
}

void FilterEdgeSentences(GroundedGraph &graph, const Index &index, size_t limit) {
  if (limit == 0) throw Error("sentences per edge must be at least 1");
  const SparseVector q = index.Vectorize(graph.question_text);
  for (GroundedEdge &e : graph.edges) {
    if (e.sentences.size() <= 1) continue;
    std::vector<std::pair<double, size_t>> ranked;
    for (size_t s = 0; s < e.sentences.size(); ++s) {
      ranked.emplace_back(Index::Cosine(q, index.Vectorize(e.sentences[s].text)), s);
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto &x, const auto &y) {
      return RanksBefore(x.first, x.second, y.first, y.second);
    });
    if (ranked.size() > limit) ranked.resize(limit);
    std::vector<EvidenceSentence> kept;
    for (const auto &[score, s] : ranked) kept.push_back(e.sentences[s]);
    e.sentences = std::move(kept);
  }
}

GroundedGraph GroundQuestion(const Question &question, const GroundingContext &context,
                             const GroundingOptions &options) {
  std::vector<std::string> vq =
      ExtractQuestionEntities(question.text, *context.corpus, options.link_threshold);
  GroundedGraph g;
  if (vq.empty()) {
    g.question_entities = {};
    g.excluded = true;
  } else {
    const std::vector<std::string> va =
        GenerateCandidates(vq, question.text, context, options.retrieved_docs);
    g = AttachEvidenceEdges(vq, va, *context.graph);
  }
  g.question_id = question.question_id;
  g.question_text = question.text;
  g.answer_entity_id = question.answer_entity_id;
  g.candidates_before_pruning = g.candidates.size();
  g.answer_in_all_candidates =
      g.answer_entity_id &&
      std::binary_search(g.candidates.begin(), g.candidates.end(), *g.answer_entity_id);
  g.answer_kept = g.answer_in_all_candidates;
  if (g.excluded) return g;
  PrefilterSentences(g, *context.index, options.prefilter_sentences);
  ScoreAndPruneNodes(g, *context.scorer, options.top_k);
  FilterEdgeSentences(g, *context.index, options.sentences_per_edge);
  return g;
}

std::string GroundedGraphToJson(const GroundedGraph &g) {
  json edges = json::array();
  for (const GroundedEdge &e : g.edges) {
    json sentences = json::array();
    for (const EvidenceSentence &s : e.sentences) {
      sentences.push_back(
          {{"text", s.text}, {"doc", s.source_doc}, {"prov", ProvenanceName(s.provenance)}});
    }
    edges.push_back({{"question_entity", e.question_entity},
                     {"candidate", e.candidate},
                     {"sentences", sentences}});
  }
  json scores = json::array();
  for (const NodeScore &s : g.node_scores) {
    scores.push_back({{"candidate", s.candidate},
                      {"score", s.score},
                      {"best_edge",
                       {{"question_entity", s.best_question_entity},
                        {"sentence", s.best_sentence}}}});
  }
  json j{{"question_id", g.question_id},
         {"question", g.question_text},
         {"question_entities", g.question_entities},
         {"candidates", g.candidates},
         {"edges", edges},
         {"glosses", g.glosses},
         {"answer_entity_id", g.answer_entity_id ? json(*g.answer_entity_id) : json(nullptr)},
         {"flags",
          {{"excluded", g.excluded},
           {"candidates_before_pruning", g.candidates_before_pruning},
           {"answer_in_all_candidates", g.answer_in_all_candidates},
           {"answer_kept", g.answer_kept}}},
         {"node_scores", scores}};
  return j.dump(1);
}

GroundedGraph GroundedGraphFromJson(const std::string &text) {
  try {
    const json j = json::parse(text);
    GroundedGraph g;
    g.question_id = j.at("question_id").get<std::string>();
    g.question_text = j.at("question").get<std::string>();
    g.question_entities = j.at("question_entities").get<std::vector<std::string>>();
    g.candidates = j.at("candidates").get<std::vector<std::string>>();
    for (const json &e : j.at("edges")) {
      GroundedEdge edge{e.at("question_entity").get<std::string>(),
                        e.at("candidate").get<std::string>(), {}};
      for (const json &s : e.at("sentences")) {
        edge.sentences.push_back({s.at("text").get<std::string>(), s.at("doc").get<std::string>(),
                                  ParseProvenance(s.at("prov").get<std::string>())});
      }
      g.edges.push_back(std::move(edge));
    }
    g.glosses = j.at("glosses").get<std::map<std::string, std::string>>();
    if (!j.at("answer_entity_id").is_null()) {
      g.answer_entity_id = j.at("answer_entity_id").get<std::string>();
    }
    const json &flags = j.at("flags");
    g.excluded = flags.at("excluded").get<bool>();
    g.candidates_before_pruning = flags.at("candidates_before_pruning").get<size_t>();
    g.answer_in_all_candidates = flags.at("answer_in_all_candidates").get<bool>();
    g.answer_kept = flags.at("answer_kept").get<bool>();
    for (const json &s : j.at("node_scores")) {
      g.node_scores.push_back({s.at("candidate").get<std::string>(), s.at("score").get<double>(),
                               s.at("best_edge").at("question_entity").get<std::string>(),
                               s.at("best_edge").at("sentence").get<std::string>()});
    }
    return g;
  } catch (const json::exception &e) {
    throw ParseError(std::string("grounded graph: ") + e.what());
  }
}

void WriteGroundedGraph(const GroundedGraph &graph, const std::string &dir) {
  std::filesystem::create_directories(dir);
  std::string name = graph.question_id;
  for (char &c : name) {
    if (c == '/' || c == '\\') c = '_';
  }
  const std::string path = (std::filesystem::path(dir) / (name + ".json")).string();
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << GroundedGraphToJson(graph) << '\n';
}

GroundedGraph ReadGroundedGraph(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return GroundedGraphFromJson(ss.str());
  } catch (const ParseError &e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::vector<GroundedGraph> ReadGroundedDir(const std::string &dir) {
  if (!std::filesystem::is_directory(dir)) throw Error("not a directory: " + dir);
  std::vector<std::string> paths;
  for (const auto &entry : std::filesystem::directory_iterator(dir)) {
    // config.json is the settings echo written beside the graphs.
    if (entry.is_regular_file() && entry.path().extension() == ".json" &&
        entry.path().filename() != "config.json") {
      paths.push_back(entry.path().string());
    }
  }
  std::sort(paths.begin(), paths.end());
  std::vector<GroundedGraph> out;
  for (const std::string &p : paths) out.push_back(ReadGroundedGraph(p));
  return out;
}

}  // namespace ftqa
