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

#include <algorithm>
#include <fstream>
#include <set>

#include <json.hpp>

#include "ftqa/error.h"
#include "ftqa/parallel.h"

namespace ftqa {

using json = nlohmann::json;

std::string AliasKey(std::string_view surface) {
  std::string key;
  for (const Token &t : ScanTokens(surface)) {
    if (!key.empty()) key.push_back(' ');
    key += Lowercase(t.text);
  }
  return key;
}

AliasTable::AliasTable(const std::vector<EntityRecord> &entities) {
  for (const EntityRecord &e : entities) {
    for (const std::string &alias : e.aliases) {
      const std::string key = AliasKey(alias);
      if (key.empty()) continue;
      Entry &entry = entries_[key];
      entry.token_count = ScanTokens(alias).size();
      auto it = std::find_if(entry.targets.begin(), entry.targets.end(),
                             [&](const Target &t) { return t.entity_id == e.entity_id; });
      if (it == entry.targets.end()) {
        entry.targets.push_back({e.entity_id, false});
        it = entry.targets.end() - 1;
      }
      if (IsAllLowercase(alias)) it->lowercase_form = true;
    }
  }
  for (auto &[key, entry] : entries_) {
    std::sort(entry.targets.begin(), entry.targets.end(),
              [](const Target &a, const Target &b) { return a.entity_id < b.entity_id; });
    const double n = static_cast<double>(entry.token_count);
    const double ambiguity = static_cast<double>(entry.targets.size() - 1);
    entry.confidence = n / (n + ambiguity);
    max_tokens_ = std::max(max_tokens_, entry.token_count);
  }
}

std::optional<double> AliasTable::Confidence(std::string_view key) const {
  auto it = entries_.find(std::string(key));
  if (it == entries_.end()) return std::nullopt;
  return it->second.confidence;
}

std::vector<Mention> AliasTable::Link(std::string_view text, double threshold) const {
  std::vector<Mention> mentions;
  const std::vector<Token> tokens = ScanTokens(text);
  std::vector<std::string> lower;
  lower.reserve(tokens.size());
  for (const Token &t : tokens) lower.push_back(Lowercase(t.text));

  size_t i = 0;
  while (i < tokens.size()) {
    bool matched = false;
    const size_t longest = std::min(max_tokens_, tokens.size() - i);
    for (size_t len = longest; len >= 1 && !matched; --len) {
      std::string key = lower[i];
      for (size_t k = 1; k < len; ++k) key += " " + lower[i + k];
      auto it = entries_.find(key);
      if (it == entries_.end()) continue;
      const Entry &entry = it->second;
      const bool lowercase_occurrence = len == 1 && IsAllLowercase(tokens[i].text);
      std::vector<const Target *> hits;
      for (const Target &t : entry.targets) {
        if (!lowercase_occurrence || t.lowercase_form) hits.push_back(&t);
      }
      if (hits.empty()) continue;
      matched = true;
      if (entry.confidence >= threshold) {
        const Span span{tokens[i].span.begin, tokens[i + len - 1].span.end};
        for (const Target *t : hits) {
          Mention m;
          m.entity_id = t->entity_id;
          m.char_span = span;
          m.confidence = entry.confidence;
          mentions.push_back(std::move(m));
        }
      }
      i += len;
    }
    if (!matched) ++i;
  }
  return mentions;
}

Corpus::Corpus(std::vector<Document> documents, std::vector<EntityRecord> entities)
    : documents_(std::move(documents)), entities_(std::move(entities)) {
  for (size_t i = 0; i < entities_.size(); ++i) {
    EntityRecord &e = entities_[i];
    if (e.entity_id.empty()) throw ParseError("entity with empty entity_id");
    if (!entity_index_.emplace(e.entity_id, i).second) {
      throw ParseError("duplicate entity_id: " + e.entity_id);
    }
    if (std::find(e.aliases.begin(), e.aliases.end(), e.canonical_title) == e.aliases.end() &&
        !e.canonical_title.empty()) {
      e.aliases.insert(e.aliases.begin(), e.canonical_title);
    }
    if (e.aliases.empty()) throw ParseError("entity " + e.entity_id + " has no aliases");
  }
  for (size_t i = 0; i < documents_.size(); ++i) {
    Document &d = documents_[i];
    if (!doc_index_.emplace(d.doc_id, i).second) {
      throw ParseError("duplicate doc_id: " + d.doc_id);
    }
    if (d.entity_id) {
      if (!entity_index_.count(*d.entity_id)) {
        throw ParseError("document " + d.doc_id + " describes unknown entity " + *d.entity_id);
      }
      if (!page_index_.emplace(*d.entity_id, i).second) {
        throw ParseError("entity " + *d.entity_id + " has more than one page");
      }
    }
    d.sentences = SplitSentences(d.text);
  }
  for (EntityRecord &e : entities_) {
    if (const Document *page = PageOf(e.entity_id)) {
      e.gloss = page->sentences.empty() ? std::string() : page->sentences[0].text;
    }
  }
  aliases_ = AliasTable(entities_);
}

const EntityRecord *Corpus::FindEntity(std::string_view entity_id) const {
  auto it = entity_index_.find(entity_id);
  return it == entity_index_.end() ? nullptr : &entities_[it->second];
}

const Document *Corpus::FindDocument(std::string_view doc_id) const {
  auto it = doc_index_.find(doc_id);
  return it == doc_index_.end() ? nullptr : &documents_[it->second];
}

const Document *Corpus::PageOf(std::string_view entity_id) const {
  auto it = page_index_.find(entity_id);
  return it == page_index_.end() ? nullptr : &documents_[it->second];
}

size_t Corpus::DocumentIndex(std::string_view doc_id) const {
  auto it = doc_index_.find(doc_id);
  if (it == doc_index_.end()) throw Error("unknown document: " + std::string(doc_id));
  return it->second;
}

std::vector<std::vector<Mention>> Corpus::LinkDocument(const Document &doc,
                                                       double threshold) const {
  std::vector<std::vector<Mention>> out(doc.sentences.size());
  for (size_t s = 0; s < doc.sentences.size(); ++s) {
    const SentenceSpan &sent = doc.sentences[s];
    out[s] = aliases_.Link(sent.text, threshold);
    for (Mention &m : out[s]) {
      m.doc_id = doc.doc_id;
      m.sentence_index = s;
      m.char_span.begin += sent.span.begin;
      m.char_span.end += sent.span.begin;
    }
  }
  return out;
}

LinkedCorpus LinkCorpus(const Corpus &corpus, double threshold, int threads) {
  LinkedCorpus linked(corpus.documents().size());
  ParallelFor(linked.size(), threads, [&](size_t i) {
    linked[i] = corpus.LinkDocument(corpus.documents()[i], threshold);
  });
  return linked;
}

namespace {

template <typename Fn>
void ForEachJsonLine(const std::string &path, Fn fn) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      fn(json::parse(line));
    } catch (const json::exception &e) {
      throw ParseError(path + " line " + std::to_string(line_no) + ": " + e.what());
    } catch (const ParseError &e) {
      throw ParseError(path + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

std::string RequiredString(const json &j, const char *key) {
  if (!j.is_object() || !j.contains(key) || !j[key].is_string()) {
    throw ParseError(std::string("missing string field \"") + key + "\"");
  }
  return j[key].get<std::string>();
}

std::optional<std::string> OptionalString(const json &j, const char *key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  if (!j[key].is_string()) throw ParseError(std::string("field \"") + key + "\" must be a string");
  return j[key].get<std::string>();
}

void WriteLines(const std::string &path, const std::vector<json> &rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open " + path + " for writing");
  for (const json &row : rows) out << row.dump() << '\n';
}

}  // namespace

std::vector<Document> ReadDocuments(const std::string &path) {
  std::vector<Document> docs;
  ForEachJsonLine(path, [&](const json &j) {
    Document d;
    d.doc_id = RequiredString(j, "doc_id");
    d.title = OptionalString(j, "title").value_or("");
    d.entity_id = OptionalString(j, "entity_id");
    d.text = RequiredString(j, "text");
    docs.push_back(std::move(d));
  });
  return docs;
}

std::vector<EntityRecord> ReadEntities(const std::string &path) {
  std::vector<EntityRecord> entities;
  ForEachJsonLine(path, [&](const json &j) {
    EntityRecord e;
    e.entity_id = RequiredString(j, "entity_id");
    e.canonical_title = RequiredString(j, "title");
    e.gloss = OptionalString(j, "gloss").value_or("");
    if (j.contains("aliases") && !j["aliases"].is_null()) {
      if (!j["aliases"].is_array()) throw ParseError("field \"aliases\" must be an array");
      for (const json &a : j["aliases"]) {
        if (!a.is_string()) throw ParseError("aliases must be strings");
        e.aliases.push_back(a.get<std::string>());
      }
    }
    entities.push_back(std::move(e));
  });
  return entities;
}

std::vector<Question> ReadQuestions(const std::string &path) {
  std::vector<Question> questions;
  std::set<std::string> seen;
  ForEachJsonLine(path, [&](const json &j) {
    Question q;
    q.question_id = RequiredString(j, "question_id");
    q.text = RequiredString(j, "text");
    q.answer_entity_id = OptionalString(j, "answer_entity_id");
    if (!seen.insert(q.question_id).second) {
      throw ParseError("duplicate question_id: " + q.question_id);
    }
    questions.push_back(std::move(q));
  });
  return questions;
}

Corpus LoadCorpus(const std::string &documents_path, const std::string &entities_path) {
  return Corpus(ReadDocuments(documents_path), ReadEntities(entities_path));
}

void WriteDocuments(const std::string &path, const std::vector<Document> &documents) {
  std::vector<json> rows;
  for (const Document &d : documents) {
    json j;
    j["doc_id"] = d.doc_id;
    j["title"] = d.title;
    j["entity_id"] = d.entity_id ? json(*d.entity_id) : json(nullptr);
    j["text"] = d.text;
    rows.push_back(std::move(j));
  }
  WriteLines(path, rows);
}

void WriteEntities(const std::string &path, const std::vector<EntityRecord> &entities) {
  std::vector<json> rows;
  for (const EntityRecord &e : entities) {
    json j;
    j["entity_id"] = e.entity_id;
    j["title"] = e.canonical_title;
    j["gloss"] = e.gloss.empty() ? json(nullptr) : json(e.gloss);
    j["aliases"] = e.aliases;
    rows.push_back(std::move(j));
  }
  WriteLines(path, rows);
}

void WriteQuestions(const std::string &path, const std::vector<Question> &questions) {
  std::vector<json> rows;
  for (const Question &q : questions) {
    json j;
    j["question_id"] = q.question_id;
    j["text"] = q.text;
    j["answer_entity_id"] = q.answer_entity_id ? json(*q.answer_entity_id) : json(nullptr);
    rows.push_back(std::move(j));
  }
  WriteLines(path, rows);
}

}  // namespace ftqa
