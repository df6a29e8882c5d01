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

#include <sstream>

namespace ftqa {

// Defined in the generated word_lists.cc.
extern const char kStopwordsData[];
extern const char kAbbreviationsData[];

namespace {

bool IsWordByte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         c >= 0x80;
}

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool IsTerminator(char c) { return c == '.' || c == '!' || c == '?'; }

bool IsCloser(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }

std::unordered_set<std::string> ParseWordList(const char *data) {
  std::unordered_set<std::string> words;
  std::istringstream in(data);
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && IsSpace(line.back())) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    words.insert(Lowercase(line));
  }
  return words;
}

// Whether the period at `dot` ends an abbreviation or an initial. A lone
// capital letter that opens its sentence is a sentence of its own, not an
// initial.
bool IsNonFinalPeriod(std::string_view text, size_t sentence_start, size_t dot) {
  size_t b = dot;
  while (b > 0 && !IsSpace(text[b - 1])) --b;
  std::string_view word = text.substr(b, dot - b);
  while (!word.empty() && (word.front() == '(' || word.front() == '"' ||
                           word.front() == '\'' || word.front() == '[')) {
    word.remove_prefix(1);
  }
  if (word.empty()) return false;
  if (word.size() == 1 && word[0] >= 'A' && word[0] <= 'Z') return b > sentence_start;
  return Abbreviations().count(Lowercase(word)) > 0;
}

}  // namespace

std::vector<Token> ScanTokens(std::string_view text) {
  std::vector<Token> tokens;
  size_t i = 0;
  while (i < text.size()) {
    if (!IsWordByte(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < text.size() && IsWordByte(static_cast<unsigned char>(text[j]))) ++j;
    tokens.push_back({std::string(text.substr(i, j - i)), {i, j}});
    i = j;
  }
  return tokens;
}

std::string Lowercase(std::string_view s) {
  std::string out(s);
  for (char &c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

bool IsAllLowercase(std::string_view s) {
  for (char c : s) {
    if (c >= 'A' && c <= 'Z') return false;
  }
  return true;
}

std::vector<std::string> WordTokens(std::string_view text) {
  std::vector<std::string> words;
  for (Token &t : ScanTokens(text)) words.push_back(Lowercase(t.text));
  return words;
}

std::string NormalizeSentence(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (char c : s) {
    if (IsSpace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
  }
  return out;
}

std::vector<SentenceSpan> SplitSentences(std::string_view text) {
  std::vector<SentenceSpan> out;
  const size_t n = text.size();
  size_t start = n;  // first non-space byte of the current sentence
  size_t last = 0;   // one past its last non-space byte

  auto emit = [&](size_t end) {
    if (start < end) out.push_back({std::string(text.substr(start, end - start)), {start, end}});
    start = n;
  };

  size_t i = 0;
  while (i < n) {
    const char c = text[i];
    if (IsSpace(c)) {
      if (c == '\n' && start < n) {
        size_t j = i + 1;
        while (j < n && IsSpace(text[j]) && text[j] != '\n') ++j;
        if (j < n && text[j] == '\n') emit(last);
      }
      ++i;
      continue;
    }
    if (start == n) start = i;
    if (IsTerminator(c)) {
      size_t j = i;
      while (j < n && IsTerminator(text[j])) ++j;
      while (j < n && IsCloser(text[j])) ++j;
      const bool boundary = j == n || IsSpace(text[j]);
      const bool single_period = c == '.' && j > i && text[i] == '.' &&
                                 (i + 1 == n || text[i + 1] != '.');
      if (boundary && !(single_period && IsNonFinalPeriod(text, start, i))) {
        last = j;
        emit(j);
        i = j;
        continue;
      }
      last = j;
      i = j;
      continue;
    }
    last = i + 1;
    ++i;
  }
  if (start < n) emit(last);
  return out;
}

const std::unordered_set<std::string> &Stopwords() {
  static const auto *words = new std::unordered_set<std::string>(ParseWordList(kStopwordsData));
  return *words;
}

const std::unordered_set<std::string> &Abbreviations() {
  static const auto *words =
      new std::unordered_set<std::string>(ParseWordList(kAbbreviationsData));
  return *words;
}

}  // namespace ftqa
