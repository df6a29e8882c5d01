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

// Tf-idf weighting, an inverted index over text units, and cosine scoring.
//
//   tf(t, u)  = 1 + ln(count of t in u)
//   idf(t)    = ln(1 + N / df(t))
//
// Terms outside the vocabulary carry no weight.

#ifndef FTQA_INDEX_H_
#define FTQA_INDEX_H_

#include <cmath>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ftqa {

// Lowercase, split on non-alphanumerics, drop tokens shorter than two bytes
// and stopwords.
std::vector<std::string> IndexTokens(std::string_view text);

// Sorted (term id, weight) pairs with strictly increasing ids.
struct SparseVector {
  std::vector<std::pair<uint32_t, double>> entries;

  double Norm() const;
  double Dot(const SparseVector &other) const;
  bool empty() const { return entries.empty(); }
};

class Vocabulary {
 public:
  // Returns -1 for unknown terms.
  int64_t Id(std::string_view term) const;
  const std::string &Term(uint32_t id) const { return terms_[id]; }
  uint32_t DocumentFrequency(uint32_t id) const { return df_[id]; }
  double Idf(uint32_t id) const;
  size_t size() const { return terms_.size(); }
  size_t document_count() const { return document_count_; }

 private:
  friend class Index;
  std::unordered_map<std::string, uint32_t> ids_;
  std::vector<std::string> terms_;
  std::vector<uint32_t> df_;
  size_t document_count_ = 0;
};

struct ScoredUnit {
  size_t unit = 0;
  double score = 0.0;
};

class Index {
 public:
  // Throws Error on an empty unit list. `ids`, when given, name the units
  // for tie-breaking; otherwise ties go to the earlier unit.
  explicit Index(const std::vector<std::string> &units,
                 std::vector<std::string> ids = {});

  const Vocabulary &vocabulary() const { return vocab_; }
  size_t unit_count() const { return unit_vectors_.size(); }
  const SparseVector &UnitVector(size_t unit) const { return unit_vectors_[unit]; }
  // Tie-break order between two units.
  bool UnitBefore(size_t a, size_t b) const;

  // Tf-idf vector of arbitrary text in this index's weight space.
  SparseVector Vectorize(std::string_view text) const;

  // Cosine of two texts; 0 if either has no in-vocabulary terms.
  double Cosine(std::string_view a, std::string_view b) const;
  static double Cosine(const SparseVector &a, const SparseVector &b);

  // Units with nonzero cosine to the query through the postings lists,
  // best first, ties by UnitBefore; at most k.
  std::vector<ScoredUnit> Retrieve(std::string_view query, size_t k) const;

  // Versioned binary cache.
  void Save(const std::string &path) const;
  static Index Load(const std::string &path);

 private:
  Index() = default;
  void Finalize(const std::vector<std::vector<std::string>> &tokenized);

  Vocabulary vocab_;
  std::vector<SparseVector> unit_vectors_;
  std::vector<double> unit_norms_;
  std::vector<std::string> ids_;
  // term id -> (unit, weight)
  std::vector<std::vector<std::pair<uint32_t, double>>> postings_;
};

// Scores are ranked on a grid of 2^-40 so that values which agree up to
// floating-point rounding tie.
inline double RankingKey(double score) { return std::nearbyint(std::ldexp(score, 40)); }

// Shared ranking rule: score descending, then id ascending.
template <typename Id>
bool RanksBefore(double score_a, const Id &id_a, double score_b, const Id &id_b) {
  const double a = RankingKey(score_a), b = RankingKey(score_b);
  if (a != b) return a > b;
  return id_a < id_b;
}

}  // namespace ftqa

#endif  // FTQA_INDEX_H_
