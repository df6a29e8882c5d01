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

// Evaluation metrics: exact match, answer recall before and after node
// pruning, and accuracy bucketed by the number of question entities.

#ifndef FTQA_EVAL_H_
#define FTQA_EVAL_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ftqa/grounding.h"

namespace ftqa {

struct Prediction {
  std::string question_id;
  std::optional<std::string> answer;
};

// Mean exact-match indicator. Both lists must cover the same question ids.
// Throws Error on empty input or an id mismatch.
double ExactMatchAccuracy(const std::vector<Prediction> &predictions,
                          const std::map<std::string, std::string> &gold);

struct RecallPair {
  double all_candidates = 0.0;
  double after_filtering = 0.0;
};

// Over graphs that are not excluded and have a gold answer. Zero when there
// are none.
RecallPair RecallMetrics(const std::vector<GroundedGraph> &graphs);

// "1-3", "4-6", "7-9" or "10+". Throws Error for zero.
std::string EntityCountBucket(size_t question_entities);

struct BucketStats {
  size_t count = 0;
  size_t correct = 0;
  double accuracy = 0.0;
  bool operator==(const BucketStats &) const = default;
};

// Only populated buckets appear in the result.
std::map<std::string, BucketStats> BucketedAccuracy(
    const std::vector<Prediction> &predictions, const std::map<std::string, std::string> &gold,
    const std::map<std::string, size_t> &entity_counts);

struct MetricsReport {
  size_t evaluated = 0;
  size_t correct = 0;
  // Questions without linked question entities or without an entity answer.
  size_t excluded = 0;
  double accuracy = 0.0;
  double recall_all_candidates = 0.0;
  double recall_after_filtering = 0.0;
  std::map<std::string, BucketStats> buckets;
  uint64_t config_fingerprint = 0;
  uint64_t seed = 0;

  std::string ToJson() const;
};

// Scores `predictions` (one per graph, matched by question id) against the
// graphs' gold answers.
MetricsReport Evaluate(const std::vector<GroundedGraph> &graphs,
                       const std::vector<Prediction> &predictions, uint64_t config_fingerprint,
                       uint64_t seed);

}  // namespace ftqa

#endif  // FTQA_EVAL_H_
