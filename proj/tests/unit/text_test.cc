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

#include "ftqa/text.h"

#include <gtest/gtest.h>

#include <string>
#include <vector>

namespace ftqa {
namespace {

std::vector<std::string> Texts(const std::vector<SentenceSpan> &spans) {
  std::vector<std::string> out;
  for (const SentenceSpan &s : spans) out.push_back(s.text);
  return out;
}

TEST(SplitSentencesTest, TwoTerminalPeriods) {
  EXPECT_EQ(Texts(SplitSentences("A. B.")), (std::vector<std::string>{"A.", "B."}));
}

TEST(SplitSentencesTest, SingleTerminator) {
  const std::string text = "Halvard was admired during his lifetime in Brenn.";
  EXPECT_EQ(Texts(SplitSentences(text)), std::vector<std::string>{text});
}

TEST(SplitSentencesTest, EmptyAndBlankText) {
  EXPECT_TRUE(SplitSentences("").empty());
  EXPECT_TRUE(SplitSentences("   \n\t ").empty());
}

// Hand-labeled split of a paragraph with abbreviations, initials, closing
// quotes and a blank-line break.
TEST(SplitSentencesTest, AbbreviationParagraphMatchesHandLabels) {
  const std::string text =
      "Dr. Osk met Mr. Vey in St. Ilda on Jan. 4. They spoke of J. R. Marr, the "
      "painter. \"Was it true?\" Vey asked! Osk laughed (twice.) Then they left\n"
      "\n"
      "A new chapter began... It rained, e.g. for days.";
  const std::vector<std::string> expected = {
      "Dr. Osk met Mr. Vey in St. Ilda on Jan. 4.",
      "They spoke of J. R. Marr, the painter.",
      "\"Was it true?\"",
      "Vey asked!",
      "Osk laughed (twice.)",
      "Then they left",
      "A new chapter began...",
      "It rained, e.g. for days.",
  };
  EXPECT_EQ(Texts(SplitSentences(text)), expected);
}

TEST(SplitSentencesTest, SpansAreTrimmedOffsets) {
  const std::string text = "  One here.   Two there!  ";
  const auto spans = SplitSentences(text);
  ASSERT_EQ(spans.size(), 2u);
  for (const SentenceSpan &s : spans) {
    EXPECT_EQ(text.substr(s.span.begin, s.span.end - s.span.begin), s.text);
  }
  EXPECT_EQ(spans[0].span, (Span{2, 11}));
}

TEST(ScanTokensTest, AlphanumericRunsWithOffsets) {
  const auto tokens = ScanTokens("Vey's 1661 café, ok");
  std::vector<std::string> words;
  for (const Token &t : tokens) words.push_back(t.text);
  EXPECT_EQ(words, (std::vector<std::string>{"Vey", "s", "1661", "café", "ok"}));
  EXPECT_EQ(tokens[2].span, (Span{6, 10}));
}

TEST(NormalizeSentenceTest, LowercasesAndCollapsesWhitespace) {
  EXPECT_EQ(NormalizeSentence("  Belmora \n painted\tCorvik. "), "belmora painted corvik.");
}

TEST(WordListsTest, ShippedListsAreLoaded) {
  EXPECT_TRUE(Stopwords().count("the"));
  EXPECT_TRUE(Abbreviations().count("dr"));
  EXPECT_FALSE(Stopwords().count("painter"));
}

}  // namespace
}  // namespace ftqa
