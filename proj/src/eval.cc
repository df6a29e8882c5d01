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

#include "ftqa/eval.h"

#include <set>

#include <json.hpp>

#include "ftqa/error.h"

namespace ftqa {

using json = nlohmann::json;

namespace {

void CheckAligned(const std::vector<Prediction> &predictions,
                  const std::map<std::string, std::string> &gold) {
  std::set<std::string> seen;
  for (const Prediction &p : predictions) {
    if (!gold.count(p.question_id)) {
      throw Error("prediction for unknown question: " + p.question_id);
    }
    if (!seen.insert(p.question_id).second) {
      throw Error("duplicate prediction for question: " + p.question_id);
    }
  }
  if (seen.size() != gold.size()) {
    for (const auto &[id, answer] : gold) {
      if (!seen.count(id)) throw Error("no prediction for question: " + id);
    }
  }
}

bool Correct(const Prediction &p, const std::map<std::string, std::string> &gold) {
  return p.answer && *p.answer == gold.at(p.question_id);
}

bool Evaluable(const GroundedGraph &g) { return !g.excluded && g.answer_entity_id.has_value(); }

}  // namespace

double ExactMatchAccuracy(const std::vector<Prediction> &predictions,
                          const std::map<std::string, std::string> &gold) {
  if (predictions.empty() && gold.empty()) throw Error("empty evaluation set");
  CheckAligned(predictions, gold);
  size_t correct = 0;
  for (const Prediction &p : predictions) correct += Correct(p, gold);
  return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

RecallPair RecallMetrics(const std::vector<GroundedGraph> &graphs) {
  size_t total = 0, all = 0, kept = 0;
  for (const GroundedGraph &g : graphs) {
    if (!Evaluable(g)) continue;
    ++total;
    all += g.answer_in_all_candidates;
    kept += g.answer_kept;
  }
  if (total == 0) return {};
  return {static_cast<double>(all) / static_cast<double>(total),
          static_cast<double>(kept) / static_cast<double>(total)};
}

std::string EntityCountBucket(size_t n) {
  if (n == 0) throw Error("questions without entities have no bucket");
  if (n <= 3) return "1-3";
  if (n <= 6) return "4-6";
  if (n <= 9) return "7-9";
  return "10+";
}

std::map<std::string, BucketStats> BucketedAccuracy(
    const std::vector<Prediction> &predictions, const std::map<std::string, std::string> &gold,
    const std::map<std::string, size_t> &entity_counts) {
  CheckAligned(predictions, gold);
  std::map<std::string, BucketStats> out;
  for (const Prediction &p : predictions) {
    auto it = entity_counts.find(p.question_id);
    if (it == entity_counts.end()) throw Error("no entity count for question: " + p.question_id);
    BucketStats &b = out[EntityCountBucket(it->second)];
    ++b.count;
    b.correct += Correct(p, gold);
  }
  for (auto &[name, b] : out) {
    b.accuracy = static_cast<double>(b.correct) / static_cast<double>(b.count);
  }
  return out;
}

std::string MetricsReport::ToJson() const {
  json bucket_json = json::object();
  for (const auto &[name, b] : buckets) {
    bucket_json[name] = {{"count", b.count}, {"correct", b.correct}, {"accuracy", b.accuracy}};
  }
  char fingerprint[17];
  std::snprintf(fingerprint, sizeof(fingerprint), "%016llx",
                static_cast<unsigned long long>(config_fingerprint));
  json j{{"accuracy", accuracy},
         {"correct", correct},
         {"evaluated", evaluated},
         {"excluded", excluded},
         {"recall_all_candidates", recall_all_candidates},
         {"recall_after_filtering", recall_after_filtering},
         {"bucket_accuracies", bucket_json},
         {"config_fingerprint", fingerprint},
         {"seed", seed}};
  return j.dump(2) + "\n";
}

MetricsReport Evaluate(const std::vector<GroundedGraph> &graphs,
                       const std::vector<Prediction> &predictions, uint64_t config_fingerprint,
                       uint64_t seed) {
  MetricsReport report;
  report.config_fingerprint = config_fingerprint;
  report.seed = seed;
  std::map<std::string, std::string> gold;
  std::map<std::string, size_t> counts;
  for (const GroundedGraph &g : graphs) {
    if (!Evaluable(g)) {
      ++report.excluded;
      continue;
    }
    if (!gold.emplace(g.question_id, *g.answer_entity_id).second) {
      throw Error("duplicate question id: " + g.question_id);
    }
    counts[g.question_id] = g.question_entities.size();
  }
  if (gold.empty()) throw Error("empty evaluation set");
  std::vector<Prediction> kept;
  for (const Prediction &p : predictions) {
    if (gold.count(p.question_id)) kept.push_back(p);
  }
  report.evaluated = gold.size();
  report.accuracy = ExactMatchAccuracy(kept, gold);
  for (const Prediction &p : kept) report.correct += Correct(p, gold);
  const RecallPair recall = RecallMetrics(graphs);
  report.recall_all_candidates = recall.all_candidates;
  report.recall_after_filtering = recall.after_filtering;
  report.buckets = BucketedAccuracy(kept, gold, counts);
  return report;
}

}  // namespace ftqa
