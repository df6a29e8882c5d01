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

#include "ftqa/index.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

#include "ftqa/binary_io.h"
#include "ftqa/error.h"
#include "ftqa/text.h"

namespace ftqa {

namespace {
constexpr const char kIndexMagic[] = "FTQAINDX";
constexpr uint32_t kIndexVersion = 1;
}  // namespace

std::vector<std::string> IndexTokens(std::string_view text) {
  std::vector<std::string> out;
  const auto &stop = Stopwords();
  for (const Token &t : ScanTokens(text)) {
    if (t.text.size() < 2) continue;
    std::string term = Lowercase(t.text);
    if (stop.count(term)) continue;
    out.push_back(std::move(term));
  }
  return out;
}

double SparseVector::Norm() const {
  double total = 0.0;
  for (const auto &[id, w] : entries) total += w * w;
  return std::sqrt(total);
}

double SparseVector::Dot(const SparseVector &other) const {
  double total = 0.0;
  size_t i = 0, j = 0;
  while (i < entries.size() && j < other.entries.size()) {
    if (entries[i].first < other.entries[j].first) {
      ++i;
    } else if (entries[i].first > other.entries[j].first) {
      ++j;
    } else {
      total += entries[i].second * other.entries[j].second;
      ++i;
      ++j;
    }
  }
  return total;
}

int64_t Vocabulary::Id(std::string_view term) const {
  auto it = ids_.find(std::string(term));
  return it == ids_.end() ? -1 : static_cast<int64_t>(it->second);
}

double Vocabulary::Idf(uint32_t id) const {
  return std::log(1.0 + static_cast<double>(document_count_) / static_cast<double>(df_[id]));
}

Index::Index(const std::vector<std::string> &units, std::vector<std::string> ids)
    : ids_(std::move(ids)) {
  if (units.empty()) throw Error("cannot build an index over zero units");
  if (!ids_.empty() && ids_.size() != units.size()) {
    throw Error("index ids must match the unit count");
  }
  std::vector<std::vector<std::string>> tokenized;
  tokenized.reserve(units.size());
  for (const std::string &u : units) tokenized.push_back(IndexTokens(u));

  // Term ids in first-occurrence order.
  vocab_.document_count_ = units.size();
  for (const auto &tokens : tokenized) {
    std::unordered_set<uint32_t> seen;
    for (const std::string &t : tokens) {
      auto [it, inserted] = vocab_.ids_.emplace(t, static_cast<uint32_t>(vocab_.terms_.size()));
      if (inserted) {
        vocab_.terms_.push_back(t);
        vocab_.df_.push_back(0);
      }
      if (seen.insert(it->second).second) ++vocab_.df_[it->second];
    }
  }
  Finalize(tokenized);
}

void Index::Finalize(const std::vector<std::vector<std::string>> &tokenized) {
  unit_vectors_.clear();
  unit_norms_.clear();
  postings_.assign(vocab_.size(), {});
  for (size_t u = 0; u < tokenized.size(); ++u) {
    std::map<uint32_t, size_t> counts;
    for (const std::string &t : tokenized[u]) {
      int64_t id = vocab_.Id(t);
      if (id >= 0) ++counts[static_cast<uint32_t>(id)];
    }
    SparseVector v;
    for (const auto &[id, c] : counts) {
      v.entries.emplace_back(id, (1.0 + std::log(static_cast<double>(c))) * vocab_.Idf(id));
    }
    for (const auto &[id, w] : v.entries) postings_[id].emplace_back(static_cast<uint32_t>(u), w);
    unit_norms_.push_back(v.Norm());
    unit_vectors_.push_back(std::move(v));
  }
}

bool Index::UnitBefore(size_t a, size_t b) const {
  if (ids_.empty()) return a < b;
  if (ids_[a] != ids_[b]) return ids_[a] < ids_[b];
  return a < b;
}

SparseVector Index::Vectorize(std::string_view text) const {
  std::map<uint32_t, size_t> counts;
  for (const std::string &t : IndexTokens(text)) {
    int64_t id = vocab_.Id(t);
    if (id >= 0) ++counts[static_cast<uint32_t>(id)];
  }
  SparseVector v;
  for (const auto &[id, c] : counts) {
    v.entries.emplace_back(id, (1.0 + std::log(static_cast<double>(c))) * vocab_.Idf(id));
  }
  return v;
}

double Index::Cosine(const SparseVector &a, const SparseVector &b) {
  const double na = a.Norm(), nb = b.Norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(a.Dot(b) / (na * nb), 0.0, 1.0);
}

double Index::Cosine(std::string_view a, std::string_view b) const {
  return Cosine(Vectorize(a), Vectorize(b));
}

std::vector<ScoredUnit> Index::Retrieve(std::string_view query, size_t k) const {
  if (k == 0) return {};
  const SparseVector q = Vectorize(query);
  const double qn = q.Norm();
  if (qn == 0.0) return {};
  // Accumulate in ascending term order so sums match SparseVector::Dot.
  std::map<uint32_t, double> acc;
  for (const auto &[id, w] : q.entries) {
    for (const auto &[unit, uw] : postings_[id]) acc[unit] += w * uw;
  }
  std::vector<ScoredUnit> scored;
  for (const auto &[unit, dot] : acc) {
    const double s = std::clamp(dot / (qn * unit_norms_[unit]), 0.0, 1.0);
    if (s > 0.0) scored.push_back({unit, s});
  }
  std::sort(scored.begin(), scored.end(), [&](const ScoredUnit &a, const ScoredUnit &b) {
    const double ka = RankingKey(a.score), kb = RankingKey(b.score);
    if (ka != kb) return ka > kb;
    return UnitBefore(a.unit, b.unit);
  });
  if (scored.size() > k) scored.resize(k);
  return scored;
}

void Index::Save(const std::string &path) const {
  BinaryWriter w;
  w.Magic(kIndexMagic);
  w.U32(kIndexVersion);
  w.U64(vocab_.document_count_);
  w.U32(static_cast<uint32_t>(vocab_.size()));
  for (size_t i = 0; i < vocab_.size(); ++i) {
    w.String(vocab_.terms_[i]);
    w.U32(vocab_.df_[i]);
  }
  w.U32(static_cast<uint32_t>(ids_.size()));
  for (const std::string &id : ids_) w.String(id);
  w.U32(static_cast<uint32_t>(unit_vectors_.size()));
  for (const SparseVector &v : unit_vectors_) {
    w.U32(static_cast<uint32_t>(v.entries.size()));
    for (const auto &[id, weight] : v.entries) {
      w.U32(id);
      w.F64(weight);
    }
  }
  w.WriteFile(path);
}

Index Index::Load(const std::string &path) {
  BinaryReader r = BinaryReader::FromFile(path);
  r.ExpectMagic(kIndexMagic);
  r.ExpectVersion(kIndexVersion);
  Index index;
  index.vocab_.document_count_ = r.U64();
  const uint32_t terms = r.U32();
  for (uint32_t i = 0; i < terms; ++i) {
    std::string t = r.String();
    const uint32_t df = r.U32();
    if (df == 0 || df > index.vocab_.document_count_) {
      throw FormatError(path + ": document frequency out of range");
    }
    index.vocab_.ids_.emplace(t, i);
    index.vocab_.terms_.push_back(std::move(t));
    index.vocab_.df_.push_back(df);
  }
  const uint32_t id_count = r.U32();
  for (uint32_t i = 0; i < id_count; ++i) index.ids_.push_back(r.String());
  const uint32_t units = r.U32();
  index.postings_.assign(terms, {});
  for (uint32_t u = 0; u < units; ++u) {
    SparseVector v;
    const uint32_t n = r.U32();
    for (uint32_t i = 0; i < n; ++i) {
      const uint32_t id = r.U32();
      const double weight = r.F64();
      if (id >= terms) throw FormatError(path + ": term id out of range");
      v.entries.emplace_back(id, weight);
      index.postings_[id].emplace_back(u, weight);
    }
    index.unit_norms_.push_back(v.Norm());
    index.unit_vectors_.push_back(std::move(v));
  }
  r.ExpectEnd();
  if (!index.ids_.empty() && index.ids_.size() != units) {
    throw FormatError(path + ": id table does not match unit count");
  }
  return index;
}

}  // namespace ftqa
