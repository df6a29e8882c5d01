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

// Text utilities shared by the corpus, index and model: token scanning,
// sentence splitting and normalization.

#ifndef FTQA_TEXT_H_
#define FTQA_TEXT_H_

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace ftqa {

// Half-open character range [begin, end) into a string.
struct Span {
  size_t begin = 0;
  size_t end = 0;
  bool operator==(const Span &) const = default;
};

// A maximal run of alphanumeric bytes (bytes >= 0x80 count as alphanumeric
// so UTF-8 words stay whole).
struct Token {
  std::string text;  // as written
  Span span;
};

std::vector<Token> ScanTokens(std::string_view text);
std::string Lowercase(std::string_view s);
bool IsAllLowercase(std::string_view s);

// Lowercased tokens, for the model vocabulary. Keeps every token.
std::vector<std::string> WordTokens(std::string_view text);

// Lowercase plus whitespace collapsing; the dedup key for edge sentences.
std::string NormalizeSentence(std::string_view s);

struct SentenceSpan {
  std::string text;
  Span span;
};

// Rule-based splitter: a sentence ends at '.', '!' or '?' (plus any closing
// quotes or brackets) followed by whitespace or end of text, unless the word
// before a period is a known abbreviation or a single capital initial.
// Blank lines always end a sentence. Spans are trimmed of whitespace.
std::vector<SentenceSpan> SplitSentences(std::string_view text);

// Word lists shipped in data/. Lowercase entries.
const std::unordered_set<std::string> &Stopwords();
const std::unordered_set<std::string> &Abbreviations();

}  // namespace ftqa

#endif  // FTQA_TEXT_H_
