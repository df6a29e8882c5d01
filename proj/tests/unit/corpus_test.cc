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

#include "ftqa/corpus.h"

#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "ftqa/error.h"
#include "test_support.h"

namespace ftqa {
namespace {

using testing::ToyCorpus;
using testing::ToyDocuments;
using testing::ToyEntities;

std::set<std::string> EntityIds(const std::vector<Mention> &mentions) {
  std::set<std::string> out;
  for (const Mention &m : mentions) out.insert(m.entity_id);
  return out;
}

TEST(CorpusTest, GlossIsFirstSentenceOfPage) {
  const Corpus corpus = ToyCorpus();
  EXPECT_EQ(corpus.FindEntity("Arden")->gloss, "Arden is a river city in the north.");
  EXPECT_EQ(corpus.FindEntity("Corvik")->gloss, "Corvik is a painting of a quiet street.");
  // No page: the catalog gloss stays.
  EXPECT_EQ(corpus.FindEntity("Tane")->gloss, "A critic.");
}

TEST(CorpusTest, EmptyCorpus) {
  const Corpus corpus({}, {});
  EXPECT_TRUE(corpus.documents().empty());
  EXPECT_TRUE(LinkCorpus(corpus, 0.1).empty());
}

TEST(CorpusTest, SentenceCountsMatchHandCount) {
  const Corpus corpus = ToyCorpus();
  ASSERT_EQ(corpus.documents().size(), 6u);
  const std::vector<size_t> expected = {3, 3, 2, 2, 3, 2};
  for (size_t i = 0; i < expected.size(); ++i) {
    EXPECT_EQ(corpus.documents()[i].sentences.size(), expected[i])
        << corpus.documents()[i].doc_id;
  }
  EXPECT_EQ(corpus.documents()[1].sentences[2].text, "Dr. Tane praised Corvik at a feast.");
}

TEST(CorpusTest, RejectsDuplicatesAndDanglingPages) {
  auto docs = ToyDocuments();
  docs.push_back(docs[0]);
  EXPECT_THROW(Corpus(docs, ToyEntities()), ParseError);

  auto entities = ToyEntities();
  entities.push_back(entities[0]);
  EXPECT_THROW(Corpus(ToyDocuments(), entities), ParseError);

  docs = ToyDocuments();
  docs[0].entity_id = "Nowhere";
  EXPECT_THROW(Corpus(docs, ToyEntities()), ParseError);
}

TEST(LinkerTest, FindsEveryEntityInQuestion) {
  const Corpus corpus = ToyCorpus();
  const auto mentions =
      corpus.LinkText("Which painting by Belmora hangs in New Harlow near the Elsin?", 0.1);
  EXPECT_EQ(EntityIds(mentions), (std::set<std::string>{"Belmora", "Elsin", "New Harlow"}));
}

TEST(LinkerTest, LongestAliasWins) {
  const Corpus corpus = ToyCorpus();
  const auto mentions = corpus.LinkText("The New Harlow Rovers won.", 0.1);
  ASSERT_EQ(mentions.size(), 1u);
  EXPECT_EQ(mentions[0].entity_id, "New Harlow Rovers");
  EXPECT_EQ(mentions[0].char_span, (Span{4, 21}));
}

TEST(LinkerTest, AmbiguousAliasConfidence) {
  const Corpus corpus = ToyCorpus();
  // Two entities share "harlow": 1 / (1 + 1).
  EXPECT_DOUBLE_EQ(*corpus.aliases().Confidence("harlow"), 0.5);
  EXPECT_DOUBLE_EQ(*corpus.aliases().Confidence("anna belmora"), 1.0);
  const auto mentions = corpus.LinkText("Harlow is busy.", 0.1);
  EXPECT_EQ(EntityIds(mentions), (std::set<std::string>{"New Harlow", "New Harlow Rovers"}));
}

TEST(LinkerTest, MaximalThresholdDropsAmbiguousMentions) {
  const Corpus corpus = ToyCorpus();
  EXPECT_TRUE(corpus.LinkText("Harlow is busy.", 1.0).empty());
}

TEST(LinkerTest, ThresholdOnlyRemovesMentions) {
  const Corpus corpus = ToyCorpus();
  const std::string text = "Harlow and Arden and the New Harlow Rovers";
  const auto low = EntityIds(corpus.LinkText(text, 0.0));
  const auto mid = EntityIds(corpus.LinkText(text, 0.5));
  const auto high = EntityIds(corpus.LinkText(text, 1.0));
  for (const auto &e : mid) EXPECT_TRUE(low.count(e));
  for (const auto &e : high) EXPECT_TRUE(mid.count(e));
  EXPECT_GT(low.size(), high.size());
}

TEST(LinkerTest, LowercaseSingleTokenNeedsLowercaseAlias) {
  const Corpus corpus = ToyCorpus();
  EXPECT_TRUE(corpus.LinkText("the arden stream", 0.1).empty());
  EXPECT_EQ(EntityIds(corpus.LinkText("the ARDEN stream", 0.1)),
            std::set<std::string>{"Arden"});
  EXPECT_EQ(EntityIds(corpus.LinkText("the dunmore guild", 0.1)),
            std::set<std::string>{"Dunmore Guild"});
}

TEST(LinkerTest, DocumentMentionsUseDocumentOffsets) {
  const Corpus corpus = ToyCorpus();
  const Document &doc = corpus.documents()[0];
  const auto linked = corpus.LinkDocument(doc, 0.1);
  ASSERT_EQ(linked.size(), doc.sentences.size());
  for (size_t s = 0; s < linked.size(); ++s) {
    for (const Mention &m : linked[s]) {
      EXPECT_EQ(m.doc_id, doc.doc_id);
      EXPECT_EQ(m.sentence_index, s);
      EXPECT_EQ(AliasKey(doc.text.substr(m.char_span.begin, m.char_span.end - m.char_span.begin)),
                AliasKey(m.entity_id));
    }
  }
}

TEST(LinkerTest, ParallelLinkingMatchesSerial) {
  const Corpus corpus = ToyCorpus();
  const LinkedCorpus serial = LinkCorpus(corpus, 0.1, 1);
  const LinkedCorpus parallel = LinkCorpus(corpus, 0.1, 4);
  ASSERT_EQ(serial.size(), parallel.size());
  for (size_t d = 0; d < serial.size(); ++d) {
    for (size_t s = 0; s < serial[d].size(); ++s) {
      ASSERT_EQ(serial[d][s].size(), parallel[d][s].size());
      for (size_t m = 0; m < serial[d][s].size(); ++m) {
        EXPECT_EQ(serial[d][s][m].entity_id, parallel[d][s][m].entity_id);
        EXPECT_EQ(serial[d][s][m].char_span, parallel[d][s][m].char_span);
      }
    }
  }
}

TEST(JsonlTest, RoundTripAndLineNumbers) {
  testing::TempDir dir;
  WriteDocuments(dir.File("d.jsonl"), ToyDocuments());
  WriteEntities(dir.File("e.jsonl"), ToyEntities());
  const Corpus corpus = LoadCorpus(dir.File("d.jsonl"), dir.File("e.jsonl"));
  EXPECT_EQ(corpus.documents().size(), 6u);
  EXPECT_EQ(corpus.entities().size(), 8u);
  EXPECT_EQ(corpus.FindEntity("Arden")->gloss, "Arden is a river city in the north.");

  const std::vector<Question> questions = {{"q1", "Who painted Corvik?", "Belmora"},
                                           {"q2", "Who?", std::nullopt}};
  WriteQuestions(dir.File("q.jsonl"), questions);
  const auto read = ReadQuestions(dir.File("q.jsonl"));
  ASSERT_EQ(read.size(), 2u);
  EXPECT_EQ(read[0].answer_entity_id, "Belmora");
  EXPECT_FALSE(read[1].answer_entity_id.has_value());

  {
    std::ofstream out(dir.File("bad.jsonl"));
    out << "{\"question_id\": \"q\", \"text\": \"ok\"}\n{\"question_id\": 3}\n";
  }
  try {
    ReadQuestions(dir.File("bad.jsonl"));
    FAIL() << "expected a parse error";
  } catch (const ParseError &e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

}  // namespace
}  // namespace ftqa
