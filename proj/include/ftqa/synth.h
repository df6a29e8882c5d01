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

// Synthetic benchmark generator. A random knowledge base of symmetric
// relation facts between invented people is written out as templated
// sentences spread over the people's own pages and over shared chronicle
// documents. Questions name `hops` people and one relation clue per person;
// the answer is the only person holding every clued fact.

#ifndef FTQA_SYNTH_H_
#define FTQA_SYNTH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "ftqa/corpus.h"

namespace ftqa {

struct RelationTemplate {
  std::string name;
  // Fact sentences with {A} and {B} placeholders.
  std::vector<std::string> sentences;
  // Question phrase preceding the named person, e.g. "collaborated with".
  std::string clue;
};

// Built-in relation set used when a spec lists none.
std::vector<RelationTemplate> DefaultRelations();

struct SyntheticSpec {
  size_t entities = 100;
  std::vector<RelationTemplate> relations = DefaultRelations();
  // Average number of facts each entity takes part in.
  double facts_per_entity = 10.0;
  // Probability that a related pair holds a second, different relation.
  double second_relation_rate = 0.35;
  size_t train_questions = 1000;
  size_t test_questions = 200;
  // Unrelated co-occurrence sentences per entity, relative to facts.
  double distractor_density = 0.5;
  size_t hops = 2;
  // Share of fact sentences placed on the first entity's page, the second
  // entity's page, and (the remainder) on chronicle documents.
  double first_page_share = 0.35;
  double second_page_share = 0.35;

  // Throws Error naming the offending field.
  void Validate() const;
};

struct Fact {
  size_t a = 0;
  size_t b = 0;
  size_t relation = 0;
  bool operator==(const Fact &) const = default;
};

struct SyntheticQuestion {
  Question question;
  size_t answer = 0;
  std::vector<size_t> question_entities;
  std::vector<size_t> relations;  // aligned with question_entities
};

struct SyntheticDataset {
  std::vector<Document> documents;
  std::vector<EntityRecord> entities;
  std::vector<Fact> facts;
  std::vector<SyntheticQuestion> train;
  std::vector<SyntheticQuestion> test;
};

// Deterministic for a given spec and seed. Throws Error when the spec
// cannot yield the requested number of distinct questions.
SyntheticDataset GenerateSynthetic(const SyntheticSpec &spec, uint64_t seed);

// Exhaustive checks of one question against the planted facts: the answer
// holds every clued fact, it is the only entity related (by any clued
// relation) to every question entity, and for two or more hops each clue
// alone is shared by at least two entities. Returns an empty string when
// the question is valid, else the reason.
std::string CheckSyntheticQuestion(const SyntheticDataset &data, const SyntheticQuestion &q);

// Writes documents.jsonl, entities.jsonl, questions.train.jsonl and
// questions.test.jsonl into `dir`.
void WriteSynthetic(const SyntheticDataset &data, const std::string &dir);

}  // namespace ftqa

#endif  // FTQA_SYNTH_H_
