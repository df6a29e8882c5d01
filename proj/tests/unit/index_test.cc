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

#include <gtest/gtest.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "ftqa/error.h"
#include "ftqa/random.h"
#include "ftqa/text.h"
#include "oracles.h"
#include "test_support.h"

namespace ftqa {
namespace {

using testing::DenseOracle;
using testing::FullSortRanking;

std::vector<size_t> Units(const std::vector<ScoredUnit> &ranked) {
  std::vector<size_t> out;
  for (const ScoredUnit &u : ranked) out.push_back(u.unit);
  return out;
}

TEST(IndexTest, SelfSimilarity) {
  const Index index({"Brenn harbor lights"});
  const auto ranked = index.Retrieve("Brenn harbor lights", 5);
  ASSERT_EQ(ranked.size(), 1u);
  EXPECT_NEAR(ranked[0].score, 1.0, 1e-12);
  EXPECT_NEAR(index.Cosine("harbor lights", "harbor lights"), 1.0, 1e-12);
}

TEST(IndexTest, DisjointTextsAreOrthogonal) {
  const Index index({"harbor lights", "mountain snow"});
  EXPECT_EQ(index.Cosine("harbor lights", "mountain snow"), 0.0);
  EXPECT_EQ(index.Cosine("unseen words", "harbor"), 0.0);
}

TEST(IndexTest, UbiquitousTermHasLowestIdf) {
  const Index index({"river brenn", "river osk", "river vey mill"});
  const Vocabulary &v = index.vocabulary();
  const double river = v.Idf(static_cast<uint32_t>(v.Id("river")));
  for (uint32_t id = 0; id < v.size(); ++id) EXPECT_LE(river, v.Idf(id));
  EXPECT_NEAR(river, std::log(2.0), 1e-12);
}

TEST(IndexTest, ThreeDocumentRanking) {
  const std::vector<std::string> docs = {"halvard painted brenn", "brenn coastal city",
                                         "osterholm coastal capital"};
  const Index index(docs);
  const auto ranked = index.Retrieve("coastal city", 10);
  EXPECT_EQ(Units(ranked), (std::vector<size_t>{1, 2}));
  EXPECT_EQ(index.Cosine("coastal city", docs[0]), 0.0);
}

TEST(IndexTest, PairwiseCosinesMatchDenseOracle) {
  const Corpus corpus = testing::ToyCorpus();
  std::vector<std::string> docs;
  for (const Document &d : corpus.documents()) docs.push_back(d.text);
  const Index index(docs);
  const DenseOracle oracle(docs);
  for (const std::string &a : docs) {
    for (const std::string &b : docs) {
      EXPECT_NEAR(index.Cosine(a, b), oracle.Cosine(a, b), 1e-9);
    }
  }
}

TEST(IndexTest, RetrieveEdgeCases) {
  const std::vector<std::string> docs = {"alpha beta", "beta gamma", "delta"};
  const Index index(docs);
  EXPECT_TRUE(index.Retrieve("beta", 0).empty());
  EXPECT_EQ(index.Retrieve("beta", 100).size(), 2u);
  EXPECT_TRUE(index.Retrieve("", 3).empty());
  EXPECT_THROW(Index(std::vector<std::string>{}), Error);
}

TEST(IndexTest, TiesGoToSmallerId) {
  const std::vector<std::string> docs = {"beta alpha", "alpha beta", "alpha beta"};
  const Index by_position(docs);
  EXPECT_EQ(Units(by_position.Retrieve("alpha", 3)), (std::vector<size_t>{0, 1, 2}));
  const Index by_id(docs, {"c", "a", "b"});
  EXPECT_EQ(Units(by_id.Retrieve("alpha", 3)), (std::vector<size_t>{1, 2, 0}));
}

// Random corpora over a small vocabulary, so exact score ties are common,
// against the exhaustive-sort oracle.
TEST(IndexTest, RetrievalMatchesFullSortOracle) {
  Rng rng(7);
  const std::vector<std::string> words = {"amber", "birch", "cobalt", "dune",  "ember",
                                          "fjord", "grove", "heath",  "inlet", "juniper"};
  for (int trial = 0; trial < 3; ++trial) {
    const size_t n = trial == 2 ? 1000 : 200;
    std::vector<std::string> docs, ids;
    for (size_t i = 0; i < n; ++i) {
      std::string d;
      const size_t len = 1 + rng.Below(4);
      for (size_t w = 0; w < len; ++w) d += words[rng.Below(words.size())] + " ";
      docs.push_back(d);
      ids.push_back("doc-" + std::to_string(rng.Below(100000)) + "-" + std::to_string(i));
    }
    const Index index(docs, ids);
    const DenseOracle oracle(docs);
    for (int q = 0; q < 10; ++q) {
      const std::string query = words[rng.Below(words.size())] + " " +
                                words[rng.Below(words.size())];
      for (size_t k : {1u, 5u, 50u, 5000u}) {
        EXPECT_EQ(Units(index.Retrieve(query, k)), FullSortRanking(oracle, docs, ids, query, k))
            << "query " << query << " k " << k;
      }
    }
  }
}

TEST(IndexTest, SaveLoadRoundTrip) {
  testing::TempDir dir;
  const std::vector<std::string> docs = {"alpha beta", "beta gamma", "delta alpha"};
  const Index index(docs, {"x", "y", "z"});
  index.Save(dir.File("index.bin"));
  const Index loaded = Index::Load(dir.File("index.bin"));
  EXPECT_EQ(loaded.unit_count(), 3u);
  const auto a = index.Retrieve("alpha beta", 3), b = loaded.Retrieve("alpha beta", 3);
  ASSERT_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].unit, b[i].unit);
    EXPECT_EQ(a[i].score, b[i].score);
  }
  {
    std::ofstream out(dir.File("bad.bin"), std::ios::binary);
    out << "NOTANIDX";
  }
  EXPECT_THROW(Index::Load(dir.File("bad.bin")), FormatError);
}

}  // namespace
}  // namespace ftqa
