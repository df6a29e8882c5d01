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

#include "ftqa/ftkg.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <tuple>

#include <json.hpp>

#include "ftqa/binary_io.h"
#include "ftqa/error.h"

namespace ftqa {

using json = nlohmann::json;

namespace {
constexpr const char kGraphMagic[] = "FTQAGRPH";
}

std::string_view ProvenanceName(Provenance p) {
  switch (p) {
    case Provenance::kInAPage:
      return "in-A-page";
    case Provenance::kInBPage:
      return "in-B-page";
    case Provenance::kExternal:
      return "external";
  }
  return "external";
}

Provenance ParseProvenance(std::string_view name) {
  if (name == "in-A-page") return Provenance::kInAPage;
  if (name == "in-B-page") return Provenance::kInBPage;
  if (name == "external") return Provenance::kExternal;
  throw ParseError("unknown provenance: " + std::string(name));
}

FreeTextGraph::FreeTextGraph(std::vector<GraphNode> nodes, std::vector<GraphEdge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  std::sort(nodes_.begin(), nodes_.end(),
            [](const GraphNode &x, const GraphNode &y) { return x.entity_id < y.entity_id; });
  std::sort(edges_.begin(), edges_.end(), [](const GraphEdge &x, const GraphEdge &y) {
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });
  for (size_t i = 0; i < nodes_.size(); ++i) {
    if (!node_index_.emplace(nodes_[i].entity_id, i).second) {
      throw FormatError("duplicate graph node: " + nodes_[i].entity_id);
    }
    adjacency_[nodes_[i].entity_id];
  }
  for (size_t i = 0; i < edges_.size(); ++i) {
    const GraphEdge &e = edges_[i];
    if (!(e.a < e.b)) throw FormatError("edge endpoints not canonical: " + e.a + " / " + e.b);
    if (!node_index_.count(e.a) || !node_index_.count(e.b)) {
      throw FormatError("edge references unknown node: " + e.a + " / " + e.b);
    }
    if (e.sentences.empty()) throw FormatError("edge without sentences: " + e.a + " / " + e.b);
    if (!edge_index_.emplace(std::make_pair(e.a, e.b), i).second) {
      throw FormatError("duplicate edge: " + e.a + " / " + e.b);
    }
    adjacency_[e.a].emplace_back(e.b, i);
    adjacency_[e.b].emplace_back(e.a, i);
  }
  for (auto &[id, list] : adjacency_) std::sort(list.begin(), list.end());
}

const GraphNode *FreeTextGraph::FindNode(std::string_view entity_id) const {
  auto it = node_index_.find(entity_id);
  return it == node_index_.end() ? nullptr : &nodes_[it->second];
}

const GraphEdge *FreeTextGraph::FindEdge(std::string_view x, std::string_view y) const {
  std::pair<std::string, std::string> key(x, y);
  if (key.second < key.first) std::swap(key.first, key.second);
  auto it = edge_index_.find(key);
  return it == edge_index_.end() ? nullptr : &edges_[it->second];
}

std::vector<std::pair<std::string, const GraphEdge *>> FreeTextGraph::Neighbors(
    std::string_view entity_id) const {
  auto it = adjacency_.find(entity_id);
  if (it == adjacency_.end()) throw Error("unknown entity: " + std::string(entity_id));
  std::vector<std::pair<std::string, const GraphEdge *>> out;
  for (const auto &[neighbor, idx] : it->second) out.emplace_back(neighbor, &edges_[idx]);
  return out;
}

namespace {

struct Candidate {
  std::string a, b;
  std::string norm;
  int rank = 1;  // 0 for page rules, 1 for rule (3)
  size_t doc = 0;
  size_t sentence = 0;
  Provenance provenance = Provenance::kExternal;
};

bool Better(const Candidate &x, const Candidate &y) {
  return std::tie(x.rank, x.doc, x.sentence) < std::tie(y.rank, y.doc, y.sentence);
}

void CollectDocument(const Corpus &corpus, size_t di,
                     const std::vector<std::vector<Mention>> &mentions,
                     std::vector<Candidate> &out) {
  const Document &doc = corpus.documents()[di];
  for (size_t s = 0; s < doc.sentences.size(); ++s) {
    std::set<std::string> linked;
    for (const Mention &m : mentions[s]) linked.insert(m.entity_id);
    const std::string norm = NormalizeSentence(doc.sentences[s].text);
    auto add = [&](const std::string &x, const std::string &y, int rank, Provenance prov) {
      Candidate c;
      c.a = std::min(x, y);
      c.b = std::max(x, y);
      c.norm = norm;
      c.rank = rank;
      c.doc = di;
      c.sentence = s;
      c.provenance = prov;
      out.push_back(std::move(c));
    };
    if (doc.entity_id) {
      const std::string &page = *doc.entity_id;
      for (const std::string &other : linked) {
        if (other == page) continue;
        add(page, other, 0, page < other ? Provenance::kInAPage : Provenance::kInBPage);
      }
    }
    for (auto x = linked.begin(); x != linked.end(); ++x) {
      for (auto y = std::next(x); y != linked.end(); ++y) add(*x, *y, 1, Provenance::kExternal);
    }
  }
}

}  // namespace

FreeTextGraph BuildGraph(const Corpus &corpus, double link_threshold, int threads) {
  return BuildGraph(corpus, LinkCorpus(corpus, link_threshold, threads));
}

FreeTextGraph BuildGraph(const Corpus &corpus, const LinkedCorpus &linked) {
  std::vector<GraphNode> nodes;
  for (const EntityRecord &e : corpus.entities()) nodes.push_back({e.entity_id, e.gloss});

  std::map<std::pair<std::string, std::string>, std::map<std::string, Candidate>> best;
  for (size_t di = 0; di < corpus.documents().size(); ++di) {
    std::vector<Candidate> found;
    CollectDocument(corpus, di, linked[di], found);
    for (Candidate &c : found) {
      auto &slot = best[{c.a, c.b}];
      auto it = slot.find(c.norm);
      if (it == slot.end()) {
        slot.emplace(c.norm, std::move(c));
      } else if (Better(c, it->second)) {
        it->second = std::move(c);
      }
    }
  }

  std::vector<GraphEdge> edges;
  for (auto &[key, by_text] : best) {
    std::vector<const Candidate *> kept;
    for (const auto &[norm, c] : by_text) kept.push_back(&c);
    std::sort(kept.begin(), kept.end(), [](const Candidate *x, const Candidate *y) {
      return std::tie(x->doc, x->sentence) < std::tie(y->doc, y->sentence);
    });
    GraphEdge edge{key.first, key.second, {}};
    for (const Candidate *c : kept) {
      const Document &doc = corpus.documents()[c->doc];
      edge.sentences.push_back({doc.sentences[c->sentence].text, doc.doc_id, c->provenance});
    }
    edges.push_back(std::move(edge));
  }
  return FreeTextGraph(std::move(nodes), std::move(edges));
}

std::string SerializeGraph(const FreeTextGraph &graph) {
  BinaryWriter w;
  w.Magic(kGraphMagic);
  w.U32(kGraphVersion);
  w.U32(static_cast<uint32_t>(graph.nodes().size()));
  for (const GraphNode &n : graph.nodes()) {
    w.String(n.entity_id);
    w.String(n.gloss);
  }
  w.U32(static_cast<uint32_t>(graph.edges().size()));
  for (const GraphEdge &e : graph.edges()) {
    w.String(e.a);
    w.String(e.b);
    w.U32(static_cast<uint32_t>(e.sentences.size()));
    for (const EvidenceSentence &s : e.sentences) {
      w.String(s.text);
      w.String(s.source_doc);
      w.U32(static_cast<uint32_t>(s.provenance));
    }
  }
  return w.data();
}

void SaveGraph(const FreeTextGraph &graph, const std::string &path) {
  BinaryWriter w;
  w.Magic(SerializeGraph(graph));
  w.WriteFile(path);
}

FreeTextGraph LoadGraph(const std::string &path) {
  BinaryReader r = BinaryReader::FromFile(path);
  r.ExpectMagic(kGraphMagic);
  r.ExpectVersion(kGraphVersion);
  std::vector<GraphNode> nodes(r.U32());
  for (GraphNode &n : nodes) {
    n.entity_id = r.String();
    n.gloss = r.String();
  }
  std::vector<GraphEdge> edges(r.U32());
  for (GraphEdge &e : edges) {
    e.a = r.String();
    e.b = r.String();
    e.sentences.resize(r.U32());
    for (EvidenceSentence &s : e.sentences) {
      s.text = r.String();
      s.source_doc = r.String();
      const uint32_t prov = r.U32();
      if (prov > 2) throw FormatError(path + ": bad provenance tag");
      s.provenance = static_cast<Provenance>(prov);
    }
  }
  r.ExpectEnd();
  return FreeTextGraph(std::move(nodes), std::move(edges));
}

void WriteGraphJsonl(const FreeTextGraph &graph, const std::string &nodes_path,
                     const std::string &edges_path) {
  std::ofstream nodes(nodes_path, std::ios::trunc);
  if (!nodes) throw Error("cannot open " + nodes_path + " for writing");
  for (const GraphNode &n : graph.nodes()) {
    nodes << json{{"entity_id", n.entity_id}, {"gloss", n.gloss}}.dump() << '\n';
  }
  std::ofstream edges(edges_path, std::ios::trunc);
  if (!edges) throw Error("cannot open " + edges_path + " for writing");
  for (const GraphEdge &e : graph.edges()) {
    json sentences = json::array();
    for (const EvidenceSentence &s : e.sentences) {
      sentences.push_back(
          {{"text", s.text}, {"doc", s.source_doc}, {"prov", ProvenanceName(s.provenance)}});
    }
    edges << json{{"a", e.a}, {"b", e.b}, {"sentences", sentences}}.dump() << '\n';
  }
}

FreeTextGraph ReadGraphJsonl(const std::string &nodes_path, const std::string &edges_path) {
  auto read_lines = [](const std::string &path, auto fn) {
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
      }
    }
  };
  std::vector<GraphNode> nodes;
  read_lines(nodes_path, [&](const json &j) {
    nodes.push_back({j.at("entity_id").get<std::string>(), j.at("gloss").get<std::string>()});
  });
  std::vector<GraphEdge> edges;
  read_lines(edges_path, [&](const json &j) {
    GraphEdge e{j.at("a").get<std::string>(), j.at("b").get<std::string>(), {}};
    for (const json &s : j.at("sentences")) {
      e.sentences.push_back({s.at("text").get<std::string>(), s.at("doc").get<std::string>(),
                             ParseProvenance(s.at("prov").get<std::string>())});
    }
    edges.push_back(std::move(e));
  });
  return FreeTextGraph(std::move(nodes), std::move(edges));
}

}  // namespace ftqa
