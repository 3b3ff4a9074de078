// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetgdt/hetgraph.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <tuple>

namespace hetgdt {

namespace {

constexpr std::array<std::string_view, kNumNodeTypes> kTypeNames = {"user", "tweet", "keyword"};
constexpr std::array<std::string_view, kNumRelations> kRelNames = {"R1", "R2", "R3",
                                                                   "R4", "R5", "R6"};
constexpr std::array<std::string_view, kNumMetaPaths> kPathNames = {"UTU", "UTKTU", "UKU"};

std::size_t ti(NodeType t) { return static_cast<std::size_t>(t); }
std::size_t ri(Relation r) { return static_cast<std::size_t>(r); }

}  // namespace

std::string_view to_string(NodeType t) { return kTypeNames[ti(t)]; }
std::string_view to_string(Relation r) { return kRelNames[ri(r)]; }
std::string_view to_string(Label l) { return l == Label::kParticipant ? "participant" : "benign"; }
std::string_view to_string(MetaPath p) { return kPathNames[static_cast<std::size_t>(p)]; }

NodeType parse_node_type(std::string_view s) {
  for (std::size_t i = 0; i < kTypeNames.size(); ++i)
    if (kTypeNames[i] == s) return static_cast<NodeType>(i);
  throw GraphError("unknown node type '" + std::string(s) + "'");
}

Relation parse_relation(std::string_view s) {
  for (std::size_t i = 0; i < kRelNames.size(); ++i)
    if (kRelNames[i] == s) return static_cast<Relation>(i);
  throw GraphError("unknown relation '" + std::string(s) + "'");
}

Label parse_label(std::string_view s) {
  if (s == "participant") return Label::kParticipant;
  if (s == "benign") return Label::kBenign;
  throw GraphError("unknown label '" + std::string(s) + "'");
}

MetaPath parse_metapath(std::string_view s) {
  for (std::size_t i = 0; i < kPathNames.size(); ++i)
    if (kPathNames[i] == s) return static_cast<MetaPath>(i);
  throw GraphError("unknown meta-path '" + std::string(s) + "'");
}

std::pair<NodeType, NodeType> signature(Relation r) {
  switch (r) {
    case Relation::kR1: return {NodeType::kUser, NodeType::kUser};
    case Relation::kR2:
    case Relation::kR3: return {NodeType::kUser, NodeType::kTweet};
    case Relation::kR4: return {NodeType::kUser, NodeType::kKeyword};
    case Relation::kR5:
    case Relation::kR6: return {NodeType::kTweet, NodeType::kKeyword};
  }
  throw GraphError("invalid relation");
}

std::vector<NodeType> metapath_types(MetaPath p) {
  using enum NodeType;
  switch (p) {
    case MetaPath::kUTU: return {kUser, kTweet, kUser};
    case MetaPath::kUTKTU: return {kUser, kTweet, kKeyword, kTweet, kUser};
    case MetaPath::kUKU: return {kUser, kKeyword, kUser};
  }
  throw GraphError("invalid meta-path");
}

Csr Csr::from_rows(const std::vector<std::vector<std::size_t>>& rows) {
  Csr csr;
  csr.offsets.reserve(rows.size() + 1);
  std::size_t total = 0;
  for (const auto& r : rows) total += r.size();
  csr.indices.reserve(total);
  for (const auto& r : rows) {
    csr.indices.insert(csr.indices.end(), r.begin(), r.end());
    csr.offsets.push_back(csr.indices.size());
  }
  return csr;
}

bool HeteroGraph::contains(std::string_view id) const {
  return position_.find(std::string(id)) != position_.end();
}

const NodeRecord& HeteroGraph::node(std::string_view id) const {
  auto it = position_.find(std::string(id));
  if (it == position_.end()) throw GraphError("unknown node '" + std::string(id) + "'");
  return nodes_[it->second];
}

TypedIndex HeteroGraph::index_of(std::string_view id) const {
  auto it = position_.find(std::string(id));
  if (it == position_.end()) throw GraphError("unknown node '" + std::string(id) + "'");
  return {nodes_[it->second].type, type_index_[it->second]};
}

const NodeRecord& HeteroGraph::node_at(NodeType t, std::size_t index) const {
  return nodes_.at(by_type_[idx(t)].at(index));
}

std::optional<Label> HeteroGraph::label(std::string_view id) const {
  auto it = labels_.find(std::string(id));
  if (it == labels_.end()) return std::nullopt;
  return it->second;
}

std::span<const std::size_t> HeteroGraph::relation_neighbors(Relation r, TypedIndex from) const {
  const auto [s, d] = signature(r);
  if (from.type == s) return rel_adj_[ri(r)][0].row(from.index);
  if (from.type == d) return rel_adj_[ri(r)][1].row(from.index);
  return {};
}

std::vector<std::size_t> HeteroGraph::typed_neighbor_indices(TypedIndex from,
                                                             NodeType neighbor_type) const {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < kNumRelations; ++r) {
    const auto rel = static_cast<Relation>(r);
    const auto [s, d] = signature(rel);
    // For same-type relations both directions reach the neighbour type.
    if (s == from.type && d == neighbor_type) {
      auto row = rel_adj_[r][0].row(from.index);
      out.insert(out.end(), row.begin(), row.end());
    }
    if (d == from.type && s == neighbor_type) {
      auto row = rel_adj_[r][1].row(from.index);
      out.insert(out.end(), row.begin(), row.end());
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::optional<Label>> HeteroGraph::user_labels() const {
  const auto& users = by_type_[idx(NodeType::kUser)];
  std::vector<std::optional<Label>> out(users.size());
  for (std::size_t i = 0; i < users.size(); ++i) {
    auto it = labels_.find(nodes_[users[i]].id);
    if (it != labels_.end()) out[i] = it->second;
  }
  return out;
}

HeteroGraph build_graph(std::vector<NodeRecord> nodes, std::vector<EdgeRecord> edges,
                        std::map<std::string, Label> labels) {
  HeteroGraph g;
  std::sort(nodes.begin(), nodes.end(),
            [](const NodeRecord& a, const NodeRecord& b) { return a.id < b.id; });
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
    if (nodes[i].id == nodes[i + 1].id) throw GraphError("duplicate node id '" + nodes[i].id + "'");
  for (const auto& n : nodes)
    if (n.id.empty()) throw GraphError("empty node id");

  g.nodes_ = std::move(nodes);
  g.position_.reserve(g.nodes_.size());
  g.type_index_.resize(g.nodes_.size());
  for (std::size_t i = 0; i < g.nodes_.size(); ++i) {
    g.position_.emplace(g.nodes_[i].id, i);
    auto& bucket = g.by_type_[ti(g.nodes_[i].type)];
    g.type_index_[i] = bucket.size();
    bucket.push_back(i);
  }

  for (const auto& [id, lbl] : labels) {
    auto it = g.position_.find(id);
    if (it == g.position_.end()) throw GraphError("label on unknown node '" + id + "'");
    if (g.nodes_[it->second].type != NodeType::kUser)
      throw GraphError("label on non-user node '" + id + "'");
  }
  g.labels_ = std::move(labels);

  // (rel, src index, dst index) in canonical orientation.
  std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> canon;
  canon.reserve(edges.size());
  for (const auto& e : edges) {
    auto si = g.position_.find(e.src);
    auto di = g.position_.find(e.dst);
    const std::string desc =
        std::string(to_string(e.rel)) + "(" + e.src + ", " + e.dst + ")";
    if (si == g.position_.end() || di == g.position_.end())
      throw GraphError("edge " + desc + " references an unknown node");
    const auto [want_s, want_d] = signature(e.rel);
    const NodeType st = g.nodes_[si->second].type;
    const NodeType dt = g.nodes_[di->second].type;
    std::size_t s = si->second;
    std::size_t d = di->second;
    if (st == want_s && dt == want_d) {
    } else if (st == want_d && dt == want_s) {
      std::swap(s, d);
    } else {
      throw GraphError("edge " + desc + ": relation " + std::string(to_string(e.rel)) +
                       " requires " + std::string(to_string(want_s)) + "–" +
                       std::string(to_string(want_d)));
    }
    if (s == d) throw GraphError("edge " + desc + " is a self-loop");
    if (want_s == want_d && s > d) std::swap(s, d);  // R1 is undirected
    canon.emplace_back(ri(e.rel), s, d);
  }
  std::sort(canon.begin(), canon.end());
  canon.erase(std::unique(canon.begin(), canon.end()), canon.end());

  g.edges_.reserve(canon.size());
  std::array<std::array<std::vector<std::vector<std::size_t>>, 2>, kNumRelations> lists;
  for (std::size_t r = 0; r < kNumRelations; ++r) {
    const auto [s, d] = signature(static_cast<Relation>(r));
    lists[r][0].resize(g.by_type_[ti(s)].size());
    lists[r][1].resize(g.by_type_[ti(d)].size());
  }
  for (const auto& [r, s, d] : canon) {
    g.edges_.push_back({g.nodes_[s].id, g.nodes_[d].id, static_cast<Relation>(r)});
    ++g.edge_counts_[r];
    const std::size_t sx = g.type_index_[s];
    const std::size_t dx = g.type_index_[d];
    lists[r][0][sx].push_back(dx);
    lists[r][1][dx].push_back(sx);
    if (r == ri(Relation::kR1)) {  // symmetric: mirror into both directions
      lists[r][0][dx].push_back(sx);
      lists[r][1][sx].push_back(dx);
    }
  }
  for (std::size_t r = 0; r < kNumRelations; ++r) {
    for (auto& dir : lists[r]) {
      for (auto& row : dir) {
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
      }
    }
    g.rel_adj_[r][0] = Csr::from_rows(lists[r][0]);
    g.rel_adj_[r][1] = Csr::from_rows(lists[r][1]);
  }
  return g;
}

bool SparseAdjacency::has(std::size_t i, std::size_t j) const {
  auto row = rows.row(i);
  return std::binary_search(row.begin(), row.end(), j);
}

namespace {

// Union of several relations' adjacency from type `from` to the other end.
std::vector<std::vector<std::size_t>> hop(const HeteroGraph& g, NodeType from,
                                          std::initializer_list<Relation> rels) {
  std::vector<std::vector<std::size_t>> out(g.num_nodes(from));
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (Relation r : rels) {
      auto row = g.relation_neighbors(r, {from, i});
      out[i].insert(out[i].end(), row.begin(), row.end());
    }
    std::sort(out[i].begin(), out[i].end());
    out[i].erase(std::unique(out[i].begin(), out[i].end()), out[i].end());
  }
  return out;
}

// Rows of (user -> middle) composed with (middle -> user), diagonal dropped.
Csr compose_to_users(const std::vector<std::vector<std::size_t>>& user_to_mid,
                     const std::vector<std::vector<std::size_t>>& mid_to_user) {
  const std::size_t n = user_to_mid.size();
  std::vector<std::size_t> stamp(n, static_cast<std::size_t>(-1));
  std::vector<std::vector<std::size_t>> rows(n);
  for (std::size_t u = 0; u < n; ++u) {
    stamp[u] = u;  // excludes the diagonal
    for (std::size_t m : user_to_mid[u]) {
      for (std::size_t v : mid_to_user[m]) {
        if (stamp[v] != u) {
          stamp[v] = u;
          rows[u].push_back(v);
        }
      }
    }
    std::sort(rows[u].begin(), rows[u].end());
  }
  return Csr::from_rows(rows);
}

}  // namespace

SparseAdjacency metapath_adjacency(const HeteroGraph& g, MetaPath p) {
  using enum NodeType;
  SparseAdjacency adj;
  adj.path = p;
  switch (p) {
    case MetaPath::kUTU: {
      auto ut = hop(g, kUser, {Relation::kR2, Relation::kR3});
      auto tu = hop(g, kTweet, {Relation::kR2, Relation::kR3});
      adj.rows = compose_to_users(ut, tu);
      break;
    }
    case MetaPath::kUKU: {
      auto uk = hop(g, kUser, {Relation::kR4});
      auto ku = hop(g, kKeyword, {Relation::kR4});
      adj.rows = compose_to_users(uk, ku);
      break;
    }
    case MetaPath::kUTKTU: {
      auto ut = hop(g, kUser, {Relation::kR2, Relation::kR3});
      auto tu = hop(g, kTweet, {Relation::kR2, Relation::kR3});
      auto tk = hop(g, kTweet, {Relation::kR5, Relation::kR6});
      auto kt = hop(g, kKeyword, {Relation::kR5, Relation::kR6});
      // user -> keyword reachable through a tweet, keyword -> user likewise.
      std::vector<std::vector<std::size_t>> uk(ut.size());
      for (std::size_t u = 0; u < ut.size(); ++u) {
        for (std::size_t t : ut[u]) uk[u].insert(uk[u].end(), tk[t].begin(), tk[t].end());
        std::sort(uk[u].begin(), uk[u].end());
        uk[u].erase(std::unique(uk[u].begin(), uk[u].end()), uk[u].end());
      }
      std::vector<std::vector<std::size_t>> ku(kt.size());
      for (std::size_t k = 0; k < kt.size(); ++k) {
        for (std::size_t t : kt[k]) ku[k].insert(ku[k].end(), tu[t].begin(), tu[t].end());
        std::sort(ku[k].begin(), ku[k].end());
        ku[k].erase(std::unique(ku[k].begin(), ku[k].end()), ku[k].end());
      }
      adj.rows = compose_to_users(uk, ku);
      break;
    }
  }
  return adj;
}

SparseAdjacency metapath_adjacency(const HeteroGraph& g, std::string_view name) {
  return metapath_adjacency(g, parse_metapath(name));
}

double cir(const HeteroGraph& g, Label ci, Label cj) {
  std::size_t ni = 0;
  std::size_t nj = 0;
  for (const auto& [id, l] : g.labels()) {
    if (l == ci) ++ni;
    if (l == cj) ++nj;
  }
  if (ni == 0 || nj == 0)
    throw GraphError("class imbalance ratio undefined: class '" +
                     std::string(to_string(ni == 0 ? ci : cj)) + "' has no labeled nodes");
  return static_cast<double>(ni) / static_cast<double>(nj);
}

SplitAssignment stratified_split(const HeteroGraph& g, double train_frac, double val_frac,
                                 std::uint64_t seed) {
  if (!(train_frac > 0.0) || !(val_frac > 0.0) || !(train_frac + val_frac < 1.0))
    throw GraphError("split fractions must be positive with train + val < 1");
  SplitAssignment split;
  split.train_frac = train_frac;
  split.val_frac = val_frac;
  split.seed = seed;

  std::array<std::vector<std::string>, kNumClasses> by_class;
  for (const auto& [id, l] : g.labels()) by_class[static_cast<std::size_t>(l)].push_back(id);

  std::mt19937_64 rng(seed);
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    auto& ids = by_class[c];  // already sorted: labels() is an ordered map
    const auto n = ids.size();
    const auto n_train = std::max<std::size_t>(1, std::llround(train_frac * n));
    const auto n_val = std::max<std::size_t>(1, std::llround(val_frac * n));
    if (n_train + n_val >= n)
      throw GraphError("class '" + std::string(to_string(static_cast<Label>(c))) + "' has " +
                       std::to_string(n) + " labeled nodes, too few for train/val/test");
    std::shuffle(ids.begin(), ids.end(), rng);
    split.train.insert(split.train.end(), ids.begin(), ids.begin() + n_train);
    split.val.insert(split.val.end(), ids.begin() + n_train, ids.begin() + n_train + n_val);
    split.test.insert(split.test.end(), ids.begin() + n_train + n_val, ids.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.val.begin(), split.val.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

std::vector<std::string> typed_neighbors(const HeteroGraph& g, std::string_view node_id,
                                         NodeType neighbor_type) {
  const auto from = g.index_of(node_id);
  std::vector<std::string> out;
  for (std::size_t j : g.typed_neighbor_indices(from, neighbor_type))
    out.push_back(g.node_at(neighbor_type, j).id);
  return out;  // index order == lexicographic id order
}

}  // namespace hetgdt
