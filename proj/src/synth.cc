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

#include "ftqa/synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <unordered_set>

#include "ftqa/error.h"
#include "ftqa/random.h"
#include "ftqa/text.h"

namespace ftqa {

std::vector<RelationTemplate> DefaultRelations() {
  return {
      {"collaborated",
       {"{A} collaborated with {B} on a cycle of frescoes.",
        "{A} and {B} collaborated on a celebrated altarpiece.",
        "For three summers {A} collaborated with {B}."},
       "collaborated with"},
      {"rival",
       {"{A} was a bitter rival of {B}.", "At court {A} was considered a rival of {B}.",
        "Chroniclers describe {A} as the chief rival of {B}."},
       "was a rival of"},
      {"corresponded",
       {"{A} corresponded with {B} for many years.",
        "Surviving letters show that {A} corresponded with {B}.",
        "{A} and {B} corresponded about matters of craft."},
       "corresponded with"},
      {"traveled",
       {"{A} traveled with {B} across the northern provinces.",
        "In youth {A} traveled with {B} to the coast.",
        "{A} and {B} traveled together through the mountain passes."},
       "traveled with"},
      {"debated",
       {"{A} publicly debated {B} on the nature of light.",
        "Before the academy {A} debated {B} at length.",
        "{A} and {B} debated the merits of the new style."},
       "debated"},
      {"studied",
       {"{A} studied alongside {B} in the same guild.",
        "As apprentices {A} and {B} studied under one master.",
        "{A} studied with {B} at the old school."},
       "studied alongside"},
  };
}

namespace {

const std::vector<std::string> kNoiseTemplates = {
    "{A} and {B} attended the same banquet.",
    "{A} once met {B} at a market fair.",
    "A portrait of {A} hangs near one of {B}.",
    "{A} and {B} were both present at the harvest festival.",
    "The ledger lists {A} and {B} among the guests.",
};

const std::vector<std::string> kProfessions = {
    "painter",   "sculptor",  "poet",      "astronomer", "cartographer",
    "composer",  "architect", "physician", "weaver",     "glassmaker",
    "engraver",  "historian", "botanist",  "jeweler",    "playwright",
};

const std::vector<std::string> kSyllables = {
    "ka", "lo",  "mir", "ven", "dra", "sel", "tor", "bai", "quen", "zo",
    "rin", "pha", "gul", "tes", "nor", "vik", "ash", "el",  "mar",  "dun",
    "ith", "ro", "sa",  "ber", "lin", "ko",  "fen", "yar", "ost",  "ul",
};

const std::vector<std::string> kPlaceSuffixes = {"holm", "wick", "stad", "mere", "ford"};

const std::vector<std::string> kQuestionForms = {
    "Which person {C}?",
    "Who {C}?",
    "Name the figure who {C}.",
};

std::string Capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

std::string Fill(const std::string &templ, const std::string &a, const std::string &b) {
  std::string out;
  for (size_t i = 0; i < templ.size();) {
    if (templ.compare(i, 3, "{A}") == 0) {
      out += a;
      i += 3;
    } else if (templ.compare(i, 3, "{B}") == 0) {
      out += b;
      i += 3;
    } else {
      out += templ[i++];
    }
  }
  return out;
}

template <typename T>
const T &Pick(const std::vector<T> &items, Rng &rng) {
  return items[rng.Below(items.size())];
}

std::string PadNumber(size_t n, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%0*zu", width, n);
  return buf;
}

// Relations holding between each unordered pair.
using PairRelations = std::map<std::pair<size_t, size_t>, std::set<size_t>>;

PairRelations IndexFacts(const std::vector<Fact> &facts) {
  PairRelations out;
  for (const Fact &f : facts) out[{std::min(f.a, f.b), std::max(f.a, f.b)}].insert(f.relation);
  return out;
}

bool Holds(const PairRelations &index, size_t x, size_t y, size_t relation) {
  auto it = index.find({std::min(x, y), std::max(x, y)});
  return it != index.end() && it->second.count(relation);
}

bool RelatedByAny(const PairRelations &index, size_t x, size_t y, const std::set<size_t> &rels) {
  auto it = index.find({std::min(x, y), std::max(x, y)});
  if (it == index.end()) return false;
  for (size_t r : rels) {
    if (it->second.count(r)) return true;
  }
  return false;
}

std::string CheckQuestion(size_t entity_count, const PairRelations &index,
                          const SyntheticQuestion &q) {
  const size_t hops = q.question_entities.size();
  if (hops == 0 || q.relations.size() != hops) return "malformed question";
  const std::set<size_t> qset(q.question_entities.begin(), q.question_entities.end());
  if (qset.size() != hops) return "repeated question entity";
  if (qset.count(q.answer)) return "answer is a question entity";
  const std::set<size_t> rels(q.relations.begin(), q.relations.end());
  for (size_t i = 0; i < hops; ++i) {
    if (!Holds(index, q.answer, q.question_entities[i], q.relations[i])) {
      return "answer lacks a clued fact";
    }
    size_t holders = 0;
    for (size_t x = 0; x < entity_count; ++x) {
      holders += Holds(index, x, q.question_entities[i], q.relations[i]);
    }
    if (hops == 1 && holders != 1) return "single clue is not unique";
    if (hops >= 2 && holders < 2) return "a single clue already identifies the answer";
  }
  for (size_t x = 0; x < entity_count; ++x) {
    if (x == q.answer || qset.count(x)) continue;
    bool all = true;
    for (size_t qe : q.question_entities) all = all && RelatedByAny(index, x, qe, rels);
    if (all) return "another entity is related to every question entity";
  }
  return "";
}

}  // namespace

void SyntheticSpec::Validate() const {
  if (entities < 2) throw Error("synthetic entities must be at least 2");
  if (relations.empty()) throw Error("synthetic relations must not be empty");
  for (const RelationTemplate &r : relations) {
    if (r.sentences.empty()) throw Error("relation " + r.name + " has no sentence templates");
    if (r.clue.empty()) throw Error("relation " + r.name + " has no clue");
  }
  if (facts_per_entity <= 0) throw Error("facts_per_entity must be positive");
  if (second_relation_rate < 0 || second_relation_rate > 1) {
    throw Error("second_relation_rate must lie in [0, 1]");
  }
  if (second_relation_rate > 0 && relations.size() < 2) {
    throw Error("second_relation_rate needs at least two relations");
  }
  if (distractor_density < 0) throw Error("distractor_density must be non-negative");
  if (hops < 1 || hops > 3) throw Error("hops must be 1, 2 or 3");
  if (first_page_share < 0 || second_page_share < 0 ||
      first_page_share + second_page_share > 1) {
    throw Error("page shares must be non-negative and sum to at most 1");
  }
}

SyntheticDataset GenerateSynthetic(const SyntheticSpec &spec, uint64_t seed) {
  spec.Validate();
  Rng rng(seed, "synthetic");
  const size_t n = spec.entities;
  SyntheticDataset data;

  // Words that names must not collide with.
  std::unordered_set<std::string> reserved;
  auto reserve_words = [&](const std::string &text) {
    for (std::string &w : WordTokens(text)) reserved.insert(std::move(w));
  };
  for (const RelationTemplate &r : spec.relations) {
    for (const std::string &s : r.sentences) reserve_words(s);
    reserve_words(r.clue);
  }
  for (const std::string &s : kNoiseTemplates) reserve_words(s);
  for (const std::string &s : kQuestionForms) reserve_words(s);
  for (const std::string &s : kProfessions) reserve_words(s);
  reserve_words("was a born in this chronicle records events of the provinces");

  auto make_word = [&](size_t syllables) {
    std::string w;
    for (size_t i = 0; i < syllables; ++i) w += Pick(kSyllables, rng);
    return w;
  };
  std::vector<std::string> names;
  std::set<std::string> used;
  size_t attempts = 0;
  while (names.size() < n) {
    if (++attempts > 1000 * n) throw Error("cannot invent enough distinct names");
    const std::string w = make_word(2 + rng.Below(2));
    if (w.size() < 4 || reserved.count(w) || !used.insert(w).second) continue;
    names.push_back(Capitalize(w));
  }
  std::vector<std::string> glosses(n);
  for (size_t i = 0; i < n; ++i) {
    std::string place;
    do {
      place = make_word(2) + Pick(kPlaceSuffixes, rng);
    } while (used.count(place));
    glosses[i] = names[i] + " was a " + Pick(kProfessions, rng) + " born in " + Capitalize(place) + ".";
  }

  // Knowledge base: random related pairs, some holding two relations.
  const double total_facts = static_cast<double>(n) * spec.facts_per_entity / 2.0;
  const size_t pair_target = static_cast<size_t>(
      std::llround(total_facts / (1.0 + spec.second_relation_rate)));
  if (pair_target > n * (n - 1) / 2) {
    throw Error("facts_per_entity too large for the entity count");
  }
  std::set<std::pair<size_t, size_t>> pairs;
  while (pairs.size() < pair_target) {
    const size_t a = rng.Below(n), b = rng.Below(n);
    if (a == b || !pairs.insert({std::min(a, b), std::max(a, b)}).second) continue;
    const size_t r = rng.Below(spec.relations.size());
    data.facts.push_back({a, b, r});
    if (rng.Bernoulli(spec.second_relation_rate)) {
      size_t r2 = rng.Below(spec.relations.size() - 1);
      if (r2 >= r) ++r2;
      data.facts.push_back({a, b, r2});
    }
  }

  // Sentence placement.
  const size_t chronicles = std::max<size_t>(1, n / 5);
  std::vector<std::vector<std::string>> page_sentences(n), chronicle_sentences(chronicles);
  std::vector<std::set<size_t>> page_mentions(n);
  auto place = [&](const std::string &text, size_t first, size_t second, double first_share,
                   double second_share) {
    const double u = rng.Uniform();
    if (u < first_share) {
      page_sentences[first].push_back(text);
      page_mentions[first].insert(second);
    } else if (u < first_share + second_share) {
      page_sentences[second].push_back(text);
      page_mentions[second].insert(first);
    } else {
      chronicle_sentences[rng.Below(chronicles)].push_back(text);
    }
  };
  for (const Fact &f : data.facts) {
    const bool swap = rng.Bernoulli(0.5);
    const size_t first = swap ? f.b : f.a, second = swap ? f.a : f.b;
    const std::string &templ = Pick(spec.relations[f.relation].sentences, rng);
    place(Fill(templ, names[first], names[second]), first, second, spec.first_page_share,
          spec.second_page_share);
  }
  const double noise_mean = spec.distractor_density * spec.facts_per_entity;
  for (size_t e = 0; e < n; ++e) {
    size_t count = static_cast<size_t>(noise_mean);
    if (rng.Bernoulli(noise_mean - static_cast<double>(count))) ++count;
    for (size_t k = 0; k < count; ++k) {
      size_t other = rng.Below(n - 1);
      if (other >= e) ++other;
      place(Fill(Pick(kNoiseTemplates, rng), names[e], names[other]), e, other, 0.5, 0.2);
    }
  }

  for (size_t e = 0; e < n; ++e) {
    rng.Shuffle(page_sentences[e]);
    std::string text = glosses[e];
    for (const std::string &s : page_sentences[e]) text += " " + s;
    data.documents.push_back({"page-" + PadNumber(e + 1, 3), names[e], names[e], text, {}});
    data.entities.push_back({names[e], names[e], "", {names[e]}});
  }
  for (size_t c = 0; c < chronicles; ++c) {
    rng.Shuffle(chronicle_sentences[c]);
    std::string text = "This chronicle records events of the provinces.";
    for (const std::string &s : chronicle_sentences[c]) text += " " + s;
    data.documents.push_back(
        {"chronicle-" + PadNumber(c + 1, 3), "Chronicle " + std::to_string(c + 1), std::nullopt,
         text, {}});
  }

  // Question tuples: every valid combination of `hops` facts of one answer,
  // reachable through the question entities' pages.
  const PairRelations index = IndexFacts(data.facts);
  std::vector<std::vector<std::pair<size_t, size_t>>> facts_of(n);  // (partner, relation)
  for (const auto &[pair, rels] : index) {
    for (size_t r : rels) {
      facts_of[pair.first].emplace_back(pair.second, r);
      facts_of[pair.second].emplace_back(pair.first, r);
    }
  }
  std::vector<SyntheticQuestion> pool;
  for (size_t a = 0; a < n; ++a) {
    const auto &fa = facts_of[a];
    std::vector<size_t> pick;
    std::function<void(size_t)> choose = [&](size_t start) {
      if (pick.size() == spec.hops) {
        SyntheticQuestion q;
        q.answer = a;
        bool reachable = false;
        for (size_t i : pick) {
          q.question_entities.push_back(fa[i].first);
          q.relations.push_back(fa[i].second);
          reachable = reachable || page_mentions[fa[i].first].count(a);
        }
        if (reachable && CheckQuestion(n, index, q).empty()) pool.push_back(std::move(q));
        return;
      }
      for (size_t i = start; i < fa.size(); ++i) {
        bool distinct = true;
        for (size_t j : pick) distinct = distinct && fa[j].first != fa[i].first;
        if (!distinct) continue;
        pick.push_back(i);
        choose(i + 1);
        pick.pop_back();
      }
    };
    choose(0);
  }
  const size_t wanted = spec.train_questions + spec.test_questions;
  if (pool.size() < wanted) {
    throw Error("synthetic spec yields only " + std::to_string(pool.size()) +
                " distinct questions, " + std::to_string(wanted) + " requested");
  }
  rng.Shuffle(pool);
  pool.resize(wanted);

  for (size_t i = 0; i < wanted; ++i) {
    SyntheticQuestion &q = pool[i];
    std::vector<size_t> order(q.question_entities.size());
    for (size_t k = 0; k < order.size(); ++k) order[k] = k;
    rng.Shuffle(order);
    std::vector<size_t> entities, relations;
    std::string clauses;
    for (size_t k = 0; k < order.size(); ++k) {
      entities.push_back(q.question_entities[order[k]]);
      relations.push_back(q.relations[order[k]]);
      if (k > 0) clauses += k + 1 == order.size() ? " and " : ", ";
      clauses += spec.relations[relations.back()].clue + " " + names[entities.back()];
    }
    q.question_entities = std::move(entities);
    q.relations = std::move(relations);
    const bool train = i < spec.train_questions;
    const size_t number = train ? i + 1 : i + 1 - spec.train_questions;
    q.question.question_id = (train ? "train-" : "test-") + PadNumber(number, 4);
    std::string form = Pick(kQuestionForms, rng);
    form.replace(form.find("{C}"), 3, clauses);
    q.question.text = form;
    q.question.answer_entity_id = names[q.answer];
    (train ? data.train : data.test).push_back(std::move(q));
  }
  return data;
}

std::string CheckSyntheticQuestion(const SyntheticDataset &data, const SyntheticQuestion &q) {
  return CheckQuestion(data.entities.size(), IndexFacts(data.facts), q);
}

void WriteSynthetic(const SyntheticDataset &data, const std::string &dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path root(dir);
  WriteDocuments((root / "documents.jsonl").string(), data.documents);
  WriteEntities((root / "entities.jsonl").string(), data.entities);
  auto questions = [](const std::vector<SyntheticQuestion> &qs) {
    std::vector<Question> out;
    for (const SyntheticQuestion &q : qs) out.push_back(q.question);
    return out;
  };
  WriteQuestions((root / "questions.train.jsonl").string(), questions(data.train));
  WriteQuestions((root / "questions.test.jsonl").string(), questions(data.test));
}

}  // namespace ftqa
