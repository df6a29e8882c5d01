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

// Exhaustive reference implementations shared by the unit and acceptance
// tests. Each one recomputes its answer from scratch with a full sort or a
// full scan, with no shared code beyond the data types.

#ifndef FTQA_TESTS_ORACLES_H_
#define FTQA_TESTS_ORACLES_H_

#include <map>
#include <string>
#include <vector>

#include "ftqa/corpus.h"
#include "ftqa/ftkg.h"
#include "ftqa/grounding.h"

namespace ftqa::testing {

// Dense tf-idf model: terms are lowercase alphanumeric runs of two or more
// bytes minus stopwords, tf = 1 + ln(count) and idf = ln(1 + N / df).
class DenseOracle {
 public:
  explicit DenseOracle(const std::vector<std::string> &docs);

  std::vector<double> Vector(const std::string &text) const;
  double Cosine(const std::string &a, const std::string &b) const;
  static std::map<std::string, int> Count(const std::string &text);

 private:
  std::vector<std::map<std::string, int>> counts_;
  std::map<std::string, int> df_;
};

// Every unit with a positive score, sorted by score then id, first k.
std::vector<size_t> FullSortRanking(const DenseOracle &oracle,
                                    const std::vector<std::string> &docs,
                                    const std::vector<std::string> &ids,
                                    const std::string &query, size_t k);

// For every entity pair and every sentence, decides from scratch whether
// the sentence belongs on the pair's edge.
std::vector<GraphEdge> PairScanOracle(const Corpus &corpus, const LinkedCorpus &linked);

// Candidates ranked by their best sentence score, then id, first k.
std::vector<std::string> PruneOracle(const GroundedGraph &graph, const EdgeScorer &scorer,
                                     size_t k);

// Each edge's sentences ranked by dense cosine with the question, then
// position, first `limit`.
std::vector<GroundedEdge> FilterOracle(const GroundedGraph &graph, const DenseOracle &oracle,
                                       size_t limit);

}  // namespace ftqa::testing

#endif  // FTQA_TESTS_ORACLES_H_
