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

// Documents, the entity catalog, and the dictionary entity linker.

#ifndef FTQA_CORPUS_H_
#define FTQA_CORPUS_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ftqa/text.h"

namespace ftqa {

struct Document {
  std::string doc_id;
  std::string title;
  // Entity this page describes, if any.
  std::optional<std::string> entity_id;
  std::string text;
  std::vector<SentenceSpan> sentences;
};

struct EntityRecord {
  std::string entity_id;
  std::string canonical_title;
  // First sentence of the entity's page; empty when it has no page and the
  // catalog gives none.
  std::string gloss;
  std::vector<std::string> aliases;
};

struct Mention {
  std::string entity_id;
  std::string doc_id;
  size_t sentence_index = 0;
  // Offsets into the linked text (the document text for page mentions).
  Span char_span;
  double confidence = 0.0;
};

struct Question {
  std::string question_id;
  std::string text;
  std::optional<std::string> answer_entity_id;
};

// Lowercased tokens joined by single spaces: the key aliases are matched on.
std::string AliasKey(std::string_view surface);

// Dictionary of alias surface forms. An alias's confidence is
//   tokens / (tokens + ambiguity), ambiguity = (#entities sharing it) - 1.
// Matching is case-insensitive, except that an all-lowercase single-token
// occurrence only matches entities that list that alias in lowercase.
class AliasTable {
 public:
  AliasTable() = default;
  explicit AliasTable(const std::vector<EntityRecord> &entities);

  // Longest match wins at each position, scanning left to right; the match
  // is chosen before the threshold is applied so raising the threshold only
  // ever removes mentions. Ambiguous aliases yield one mention per entity.
  std::vector<Mention> Link(std::string_view text, double threshold) const;

  // Confidence of an alias key, or nullopt if unknown.
  std::optional<double> Confidence(std::string_view key) const;
  size_t size() const { return entries_.size(); }

 private:
  struct Target {
    std::string entity_id;
    bool lowercase_form = false;
  };
  struct Entry {
    size_t token_count = 0;
    std::vector<Target> targets;  // ascending entity id
    double confidence = 0.0;
  };
  std::unordered_map<std::string, Entry> entries_;
  size_t max_tokens_ = 0;
};

class Corpus {
 public:
  Corpus() = default;
  // Validates ids, splits sentences, derives glosses and alias tables.
  // Throws ParseError on duplicates or dangling page references.
  Corpus(std::vector<Document> documents, std::vector<EntityRecord> entities);

  const std::vector<Document> &documents() const { return documents_; }
  const std::vector<EntityRecord> &entities() const { return entities_; }
  const AliasTable &aliases() const { return aliases_; }

  const EntityRecord *FindEntity(std::string_view entity_id) const;
  const Document *FindDocument(std::string_view doc_id) const;
  // The page describing `entity_id`, or null.
  const Document *PageOf(std::string_view entity_id) const;
  // Position of a document in load order, used as "corpus order".
  size_t DocumentIndex(std::string_view doc_id) const;

  std::vector<Mention> LinkText(std::string_view text, double threshold) const {
    return aliases_.Link(text, threshold);
  }
  // Mentions of one document, per sentence, with document-level offsets.
  std::vector<std::vector<Mention>> LinkDocument(const Document &doc, double threshold) const;

 private:
  std::vector<Document> documents_;
  std::vector<EntityRecord> entities_;
  AliasTable aliases_;
  std::map<std::string, size_t, std::less<>> entity_index_;
  std::map<std::string, size_t, std::less<>> doc_index_;
  std::map<std::string, size_t, std::less<>> page_index_;
};

// Mentions for every sentence of every document, in document order.
// Parallel over documents with `threads` workers; output is identical for
// any thread count.
using LinkedCorpus = std::vector<std::vector<std::vector<Mention>>>;
LinkedCorpus LinkCorpus(const Corpus &corpus, double threshold, int threads = 1);

// JSONL readers. Errors name the file and 1-based line.
std::vector<Document> ReadDocuments(const std::string &path);
std::vector<EntityRecord> ReadEntities(const std::string &path);
std::vector<Question> ReadQuestions(const std::string &path);
Corpus LoadCorpus(const std::string &documents_path, const std::string &entities_path);

void WriteDocuments(const std::string &path, const std::vector<Document> &documents);
void WriteEntities(const std::string &path, const std::vector<EntityRecord> &entities);
void WriteQuestions(const std::string &path, const std::vector<Question> &questions);

}  // namespace ftqa

#endif  // FTQA_CORPUS_H_
