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

// The free-text knowledge graph: one node per cataloged entity, and one
// undirected edge per entity pair that co-occurs in corpus sentences. An
// edge between a and b collects
//   - sentences on a's page that mention b,
//   - sentences on b's page that mention a,
//   - sentences anywhere that mention both,
// deduplicated by normalized text.

#ifndef FTQA_FTKG_H_
#define FTQA_FTKG_H_

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ftqa/corpus.h"

namespace ftqa {

enum class Provenance { kInAPage, kInBPage, kExternal };

std::string_view ProvenanceName(Provenance p);
Provenance ParseProvenance(std::string_view name);

struct GraphNode {
  std::string entity_id;
  std::string gloss;
  bool operator==(const GraphNode &) const = default;
};

struct EvidenceSentence {
  std::string text;
  std::string source_doc;
  Provenance provenance = Provenance::kExternal;
  bool operator==(const EvidenceSentence &) const = default;
};

// Endpoints are stored canonically with a < b. Sentences are in corpus order.
struct GraphEdge {
  std::string a;
  std::string b;
  std::vector<EvidenceSentence> sentences;
  bool operator==(const GraphEdge &) const = default;
};

class FreeTextGraph {
 public:
  FreeTextGraph() = default;
  // Validates the simple-graph invariants and builds adjacency.
  FreeTextGraph(std::vector<GraphNode> nodes, std::vector<GraphEdge> edges);

  const std::vector<GraphNode> &nodes() const { return nodes_; }
  const std::vector<GraphEdge> &edges() const { return edges_; }
  const GraphNode *FindNode(std::string_view entity_id) const;
  const GraphEdge *FindEdge(std::string_view x, std::string_view y) const;

  // Incident edges in ascending neighbor order. Throws for unknown entities.
  std::vector<std::pair<std::string, const GraphEdge *>> Neighbors(
      std::string_view entity_id) const;

  bool operator==(const FreeTextGraph &other) const {
    return nodes_ == other.nodes_ && edges_ == other.edges_;
  }

 private:
  std::vector<GraphNode> nodes_;  // ascending id
  std::vector<GraphEdge> edges_;  // ascending (a, b)
  std::map<std::string, size_t, std::less<>> node_index_;
  std::map<std::pair<std::string, std::string>, size_t> edge_index_;
  std::map<std::string, std::vector<std::pair<std::string, size_t>>, std::less<>> adjacency_;
};

// Builds the graph from sentences linked at `link_threshold`.
FreeTextGraph BuildGraph(const Corpus &corpus, double link_threshold, int threads = 1);
FreeTextGraph BuildGraph(const Corpus &corpus, const LinkedCorpus &linked);

// Binary cache: magic "FTQAGRPH", u32 version, then nodes and edges.
inline constexpr uint32_t kGraphVersion = 1;
void SaveGraph(const FreeTextGraph &graph, const std::string &path);
FreeTextGraph LoadGraph(const std::string &path);
std::string SerializeGraph(const FreeTextGraph &graph);

// nodes.jsonl: {"entity_id", "gloss"}
// edges.jsonl: {"a", "b", "sentences": [{"text", "doc", "prov"}]}
void WriteGraphJsonl(const FreeTextGraph &graph, const std::string &nodes_path,
                     const std::string &edges_path);
FreeTextGraph ReadGraphJsonl(const std::string &nodes_path, const std::string &edges_path);

}  // namespace ftqa

#endif  // FTQA_FTKG_H_
