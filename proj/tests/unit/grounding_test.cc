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

#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "ftqa/error.h"
#include "ftqa/random.h"
#include "test_support.h"

namespace ftqa {
namespace {

// Toy resources built once per test.
struct ToyWorld {
  Corpus corpus = testing::ToyCorpus();
  LinkedCorpus linked = LinkCorpus(corpus, 0.1);
  FreeTextGraph graph = BuildGraph(corpus, linked);
  Index index = BuildDocumentIndex(corpus);
  LexicalEdgeScorer scorer{&index};
  GroundingContext context() const { return {&corpus, &linked, &graph, &index, &scorer}; }
};

const char kToyQuestion[] = "Which painting by Belmora was sold in New Harlow?";

// Scores sentences by their length modulo 3, so ties are frequent.
class LengthScorer : public EdgeScorer {
 public:
  double Score(std::string_view, std::string_view sentence, std::string_view) const override {
    return static_cast<double>(sentence.size() % 3) / 2.0;
  }
};

TEST(QuestionEntitiesTest, ToyQuestion) {
  const ToyWorld w;
  EXPECT_EQ(ExtractQuestionEntities(kToyQuestion, w.corpus, 0.1),
            (std::vector<std::string>{"Belmora", "New Harlow"}));
}

TEST(QuestionEntitiesTest, NoAliasesMeansExcluded) {
  const ToyWorld w;
  EXPECT_TRUE(ExtractQuestionEntities("Who wrote the long poem?", w.corpus, 0.1).empty());
  const GroundedGraph g =
      GroundQuestion({"q", "Who wrote the long poem?", "Arden"}, w.context(), GroundingOptions());
  EXPECT_TRUE(g.excluded);
  EXPECT_TRUE(g.candidates.empty());
  EXPECT_FALSE(g.answer_kept);
}

TEST(QuestionEntitiesTest, ThresholdSweepShrinksMonotonically) {
  const ToyWorld w;
  const std::string q = "Did Harlow fans cheer Belmora in Arden?";
  std::vector<std::set<std::string>> sets;
  for (double t : {0.0, 0.5, 0.75}) {
    const auto ids = ExtractQuestionEntities(q, w.corpus, t);
    sets.emplace_back(ids.begin(), ids.end());
  }
  for (size_t i = 1; i < sets.size(); ++i) {
    EXPECT_TRUE(std::includes(sets[i - 1].begin(), sets[i - 1].end(), sets[i].begin(),
                              sets[i].end()));
  }
  EXPECT_EQ(sets[0].size(), 4u);
  EXPECT_EQ(sets[2], (std::set<std::string>{"Arden", "Belmora"}));
}

TEST(CandidatesTest, EntityOnQuestionEntityPage) {
  const ToyWorld w;
  const auto c = GenerateCandidates({"Belmora"}, "Who was Belmora?", w.context(), 0);
  EXPECT_TRUE(std::binary_search(c.begin(), c.end(), "Arden"));
}

TEST(CandidatesTest, LinkRouteOnlyWithoutRetrieval) {
  const ToyWorld w;
  // Mentions on Belmora's page, by hand: Arden, Belmora, Corvik, Tane.
  EXPECT_EQ(GenerateCandidates({"Belmora", "New Harlow"}, kToyQuestion, w.context(), 0),
            (std::vector<std::string>{"Arden", "Corvik", "Tane"}));
}

TEST(CandidatesTest, UnionOfBothRoutes) {
  const ToyWorld w;
  std::set<std::string> expected = {"Arden", "Corvik", "Tane"};
  for (const ScoredUnit &hit : w.index.Retrieve(kToyQuestion, 3)) {
    const Document &doc = w.corpus.documents()[hit.unit];
    if (doc.entity_id) expected.insert(*doc.entity_id);
    for (const auto &sentence : w.corpus.LinkDocument(doc, 0.1)) {
      for (const Mention &m : sentence) expected.insert(m.entity_id);
    }
  }
  expected.erase("Belmora");
  expected.erase("New Harlow");
  const auto got = GenerateCandidates({"Belmora", "New Harlow"}, kToyQuestion, w.context(), 3);
  EXPECT_EQ(std::set<std::string>(got.begin(), got.end()), expected);
  EXPECT_TRUE(std::is_sorted(got.begin(), got.end()));
}

TEST(EvidenceEdgesTest, CarriesGraphSentences) {
  const ToyWorld w;
  const GroundedGraph g = AttachEvidenceEdges({"Belmora"}, {"Corvik"}, w.graph);
  ASSERT_EQ(g.edges.size(), 1u);
  EXPECT_EQ(g.edges[0].sentences[0].text, "Belmora painted Corvik in 1661.");
}

TEST(EvidenceEdgesTest, CandidateWithoutEdgeIsDropped) {
  const ToyWorld w;
  const GroundedGraph g =
      AttachEvidenceEdges({"Corvik"}, {"Belmora", "New Harlow Rovers"}, w.graph);
  EXPECT_EQ(g.candidates, std::vector<std::string>{"Belmora"});
  EXPECT_FALSE(g.glosses.count("New Harlow Rovers"));
}

TEST(EvidenceEdgesTest, EdgeCountEqualsAdjacencyIntersection) {
  const ToyWorld w;
  const std::vector<std::string> vq = {"Belmora", "Elsin"};
  std::vector<std::string> va;
  for (const GraphNode &n : w.graph.nodes()) {
    if (n.entity_id != "Belmora" && n.entity_id != "Elsin") va.push_back(n.entity_id);
  }
  size_t expected = 0;
  for (const std::string &q : vq) {
    for (const auto &[neighbor, edge] : w.graph.Neighbors(q)) {
      expected += std::count(va.begin(), va.end(), neighbor);
    }
  }
  EXPECT_EQ(AttachEvidenceEdges(vq, va, w.graph).edges.size(), expected);
  EXPECT_GT(expected, 3u);
}

// Grounded graph with `n` candidates, each with sentences of varied length.
GroundedGraph SyntheticGraph(size_t n, Rng &rng) {
  GroundedGraph g;
  g.question_text = "alpha beta gamma";
  g.question_entities = {"Q1", "Q2"};
  const std::vector<std::string> words = {"alpha", "beta", "gamma", "delta", "epsilon"};
  for (size_t c = 0; c < n; ++c) {
    const std::string id = "C" + std::to_string(100 + c);
    g.candidates.push_back(id);
    g.glosses[id] = "";
    for (const std::string &q : g.question_entities) {
      if (rng.Bernoulli(0.3) && q == "Q2") continue;
      GroundedEdge e{q, id, {}};
      const size_t count = 1 + rng.Below(8);
      for (size_t s = 0; s < count; ++s) {
        std::string text;
        const size_t len = 1 + rng.Below(5);
        for (size_t k = 0; k < len; ++k) text += words[rng.Below(words.size())] + " ";
        e.sentences.push_back({text + std::to_string(s), "doc", Provenance::kExternal});
      }
      g.edges.push_back(e);
    }
  }
  g.answer_entity_id = g.candidates[0];
  g.answer_kept = true;
  return g;
}

TEST(PruneTest, SlackBudgetKeepsEverything) {
  Rng rng(3);
  GroundedGraph g = SyntheticGraph(6, rng);
  const GroundedGraph before = g;
  ScoreAndPruneNodes(g, LengthScorer(), 6);
  EXPECT_EQ(g.candidates, before.candidates);
  EXPECT_EQ(g.edges, before.edges);
  EXPECT_TRUE(g.answer_kept);
  EXPECT_THROW(ScoreAndPruneNodes(g, LengthScorer(), 0), Error);
}

TEST(PruneTest, KeptSetEqualsFullSortOracle) {
  Rng rng(5);
  const LengthScorer scorer;
  for (int trial = 0; trial < 20; ++trial) {
    GroundedGraph g = SyntheticGraph(5 + rng.Below(30), rng);
    const size_t k = 1 + rng.Below(10);
    // Oracle: best sentence score per candidate, full sort by score
    // descending then id ascending.
    std::vector<std::pair<double, std::string>> all;
    for (const std::string &c : g.candidates) {
      double best = 0;
      for (const GroundedEdge &e : g.edges) {
        if (e.candidate != c) continue;
        for (const auto &s : e.sentences) best = std::max(best, scorer.Score("", s.text, ""));
      }
      all.emplace_back(-best, c);
    }
    std::sort(all.begin(), all.end());
    std::vector<std::string> expected;
    for (size_t i = 0; i < all.size() && i < k; ++i) expected.push_back(all[i].second);

    ScoreAndPruneNodes(g, scorer, k);
    std::vector<std::string> ranked;
    for (const NodeScore &s : g.node_scores) ranked.push_back(s.candidate);
    EXPECT_EQ(ranked, expected);
    std::sort(expected.begin(), expected.end());
    EXPECT_EQ(g.candidates, expected);
    for (const GroundedEdge &e : g.edges) {
      EXPECT_TRUE(std::binary_search(expected.begin(), expected.end(), e.candidate));
    }
    EXPECT_EQ(g.answer_kept, std::binary_search(expected.begin(), expected.end(),
                                                *g.answer_entity_id));
  }
}

TEST(FilterTest, SingleSentenceEdgeUnchanged) {
  const Index index({"alpha beta", "gamma"});
  GroundedGraph g;
  g.question_text = "gamma";
  g.edges = {{"Q", "C", {{"alpha beta", "d", Provenance::kExternal}}}};
  const GroundedGraph before = g;
  FilterEdgeSentences(g, index, 5);
  EXPECT_EQ(g, before);
}

TEST(FilterTest, EightSentenceEdgeKeepsBruteForceTopFive) {
  const std::vector<std::string> sentences = {
      "amber birch", "cobalt dune ember", "amber amber", "fjord", "birch cobalt amber",
      "grove heath", "amber birch",       "dune"};
  const Index index(sentences);
  GroundedGraph g;
  g.question_text = "amber birch cobalt";
  GroundedEdge e{"Q", "C", {}};
  for (const std::string &s : sentences) e.sentences.push_back({s, "d", Provenance::kExternal});
  g.edges = {e};
  // Brute force: cosine of every sentence, stable sort by score descending.
  std::vector<std::pair<double, size_t>> scored;
  for (size_t i = 0; i < sentences.size(); ++i) {
    scored.emplace_back(index.Cosine(g.question_text, sentences[i]), i);
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto &x, const auto &y) {
                     return RankingKey(x.first) > RankingKey(y.first);
                   });
  FilterEdgeSentences(g, index, 5);
  ASSERT_EQ(g.edges[0].sentences.size(), 5u);
  for (size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(g.edges[0].sentences[i].text, sentences[scored[i].second]);
  }
}

TEST(FilterTest, PrefilterKeepsGlobalTopSentences) {
  Rng rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    GroundedGraph g = SyntheticGraph(10, rng);
    std::vector<std::string> units;
    for (const auto &e : g.edges) {
      for (const auto &s : e.sentences) units.push_back(s.text);
    }
    const Index index(units);
    const size_t limit = 1 + rng.Below(units.size());
    // Oracle over (score, edge, sentence) triples.
    std::vector<std::tuple<double, size_t, size_t>> all;
    for (size_t e = 0; e < g.edges.size(); ++e) {
      for (size_t s = 0; s < g.edges[e].sentences.size(); ++s) {
        all.emplace_back(-RankingKey(index.Cosine(g.question_text, g.edges[e].sentences[s].text)),
                         e, s);
      }
    }
    std::sort(all.begin(), all.end());
    std::multiset<std::string> expected;
    for (size_t i = 0; i < limit; ++i) {
      const auto &[score, e, s] = all[i];
      expected.insert(g.edges[e].question_entity + "|" + g.edges[e].candidate + "|" +
                      g.edges[e].sentences[s].text);
    }
    PrefilterSentences(g, index, limit);
    std::multiset<std::string> got;
    for (const auto &e : g.edges) {
      EXPECT_FALSE(e.sentences.empty());
      for (const auto &s : e.sentences) {
        got.insert(e.question_entity + "|" + e.candidate + "|" + s.text);
      }
    }
    EXPECT_EQ(got, expected);
  }
}

TEST(ScorerTest, DegenerateFeaturesGiveOneHalf) {
  std::vector<ScorerExample> examples;
  for (int i = 0; i < 10; ++i) examples.push_back({{0.3, 0.3, 0.3}, i % 2 ? 1.0 : 0.0});
  const LexicalEdgeScorer scorer(nullptr, FitScorer(examples));
  EXPECT_NEAR(scorer.ScoreFeatures({0.3, 0.3, 0.3}), 0.5, 1e-9);
  EXPECT_THROW(FitScorer({{{0.1, 0.1, 0.1}, 0.0}}), Error);
}

TEST(ScorerTest, PlantedSeparatingFeatureRanksPositivesFirst) {
  Rng rng(13);
  std::vector<ScorerExample> examples;
  for (int i = 0; i < 200; ++i) {
    const bool positive = i % 5 == 0;
    examples.push_back({{rng.Uniform(0, 0.3), positive ? rng.Uniform(0.6, 1.0)
                                                       : rng.Uniform(0.0, 0.4),
                         rng.Uniform(0, 0.3)},
                        positive ? 1.0 : 0.0});
  }
  const LexicalEdgeScorer scorer(nullptr, FitScorer(examples));
  double worst_positive = 1, best_negative = 0;
  for (const ScorerExample &e : examples) {
    const double s = scorer.ScoreFeatures(e.features);
    if (e.label > 0) {
      worst_positive = std::min(worst_positive, s);
    } else {
      best_negative = std::max(best_negative, s);
    }
  }
  EXPECT_GT(worst_positive, best_negative);
  EXPECT_GT(scorer.weights().w[1], 0.0);
}

TEST(ScorerTest, AnswerEdgesSharingDistinctiveTokenRankFirst) {
  // Answer edges repeat the question's distinctive word; others do not.
  std::vector<std::string> units;
  std::vector<GroundedGraph> graphs;
  Rng rng(21);
  const std::vector<std::string> filler = {"walked", "river", "market", "evening", "lamp"};
  for (int q = 0; q < 30; ++q) {
    GroundedGraph g;
    g.question_id = "q" + std::to_string(q);
    const std::string key = "token" + std::to_string(q);
    g.question_text = "which person " + key + " here";
    g.question_entities = {"Q"};
    for (int c = 0; c < 6; ++c) {
      const std::string id = "C" + std::to_string(c);
      g.candidates.push_back(id);
      g.glosses[id] = "";
      GroundedEdge e{"Q", id, {}};
      for (int s = 0; s < 2; ++s) {
        std::string text = filler[rng.Below(filler.size())] + " " +
                           filler[rng.Below(filler.size())] + " " + std::to_string(s);
        if (c == 0) text += " " + key;
        units.push_back(text);
        e.sentences.push_back({text, "d", Provenance::kExternal});
      }
      g.edges.push_back(e);
    }
    g.answer_entity_id = "C0";
    g.answer_kept = true;
    units.push_back(g.question_text);
    graphs.push_back(g);
  }
  const Index index(units);
  LexicalEdgeScorer scorer(&index);
  const auto examples = SampleScorerExamples(graphs, scorer, 10, 1);
  EXPECT_EQ(examples, SampleScorerExamples(graphs, scorer, 10, 1));
  scorer.set_weights(FitScorer(examples));
  for (GroundedGraph g : graphs) {
    ScoreAndPruneNodes(g, scorer, 1);
    EXPECT_EQ(g.candidates, std::vector<std::string>{"C0"});
  }
}

TEST(ScorerTest, WeightsRoundTrip) {
  testing::TempDir dir;
  const LexicalEdgeScorer scorer(nullptr, {{1.5, -2.0, 0.25}, 0.75});
  scorer.Save(dir.File("scorer.json"));
  EXPECT_EQ(LexicalEdgeScorer::LoadWeights(dir.File("scorer.json")), scorer.weights());
}

TEST(GroundQuestionTest, EndToEndFlagsAndJson) {
  const ToyWorld w;
  GroundingOptions options;
  options.top_k = 1;
  options.sentences_per_edge = 1;
  const GroundedGraph g = GroundQuestion({"q7", kToyQuestion, "Corvik"}, w.context(), options);
  EXPECT_FALSE(g.excluded);
  EXPECT_TRUE(g.answer_in_all_candidates);
  EXPECT_GE(g.candidates_before_pruning, g.candidates.size());
  EXPECT_EQ(g.candidates.size(), 1u);
  for (const GroundedEdge &e : g.edges) EXPECT_EQ(e.sentences.size(), 1u);
  EXPECT_EQ(g.answer_kept, g.candidates[0] == "Corvik");

  EXPECT_EQ(GroundedGraphFromJson(GroundedGraphToJson(g)), g);
  testing::TempDir dir;
  WriteGroundedGraph(g, dir.path().string());
  const auto all = ReadGroundedDir(dir.path().string());
  ASSERT_EQ(all.size(), 1u);
  EXPECT_EQ(all[0], g);
}

}  // namespace
}  // namespace ftqa
