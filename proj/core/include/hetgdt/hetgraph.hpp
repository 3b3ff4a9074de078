// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hetgdt/csr.hpp"

namespace hetgdt {

/// Raised for malformed graph input: bad relation signatures, duplicate ids,
/// labels on non-user nodes, unknown nodes or meta-paths.
class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class NodeType : std::uint8_t { kUser = 0, kTweet = 1, kKeyword = 2 };
inline constexpr std::size_t kNumNodeTypes = 3;
inline constexpr std::array<NodeType, kNumNodeTypes> kAllNodeTypes = {
    NodeType::kUser, NodeType::kTweet, NodeType::kKeyword};

/// R1 user-follow-user, R2 user-post-tweet, R3 user-engage-tweet,
/// R4 user-profile-keyword, R5 tweet-include-keyword, R6 tweet-tag-keyword.
enum class Relation : std::uint8_t { kR1 = 0, kR2, kR3, kR4, kR5, kR6 };
inline constexpr std::size_t kNumRelations = 6;

enum class Label : std::uint8_t { kBenign = 0, kParticipant = 1 };
inline constexpr std::size_t kNumClasses = 2;

std::string_view to_string(NodeType t);
std::string_view to_string(Relation r);
std::string_view to_string(Label l);
NodeType parse_node_type(std::string_view s);
Relation parse_relation(std::string_view s);
Label parse_label(std::string_view s);

/// Endpoint types of a relation, in canonical (src, dst) order.
std::pair<NodeType, NodeType> signature(Relation r);

struct NodeRecord {
  std::string id;
  NodeType type = NodeType::kUser;
  std::string text;
};

struct EdgeRecord {
  std::string src;
  std::string dst;
  Relation rel = Relation::kR1;
};

/// Index of a node inside its own type's contiguous index space.
struct TypedIndex {
  NodeType type;
  std::size_t index;
};

/// Immutable typed graph. Per-type index maps are assigned by lexicographic
/// id order, so two graphs with the same content index identically.
class HeteroGraph {
 public:
  HeteroGraph() = default;

  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_nodes(NodeType t) const { return by_type_[idx(t)].size(); }
  std::size_t num_edges() const { return edges_.size(); }
  std::size_t num_edges(Relation r) const { return edge_counts_[static_cast<std::size_t>(r)]; }

  /// Nodes in global id order.
  const std::vector<NodeRecord>& nodes() const { return nodes_; }
  /// Canonically oriented, de-duplicated edges sorted by (rel, src, dst).
  const std::vector<EdgeRecord>& edges() const { return edges_; }
  const std::map<std::string, Label>& labels() const { return labels_; }

  bool contains(std::string_view id) const;
  const NodeRecord& node(std::string_view id) const;
  TypedIndex index_of(std::string_view id) const;
  /// Node at position `index` of type `t`.
  const NodeRecord& node_at(NodeType t, std::size_t index) const;
  const std::vector<std::size_t>& ids_of_type(NodeType t) const { return by_type_[idx(t)]; }
  std::optional<Label> label(std::string_view id) const;

  /// Neighbours of a node through one relation, as indices into the other
  /// endpoint's type space (sorted, unique).
  std::span<const std::size_t> relation_neighbors(Relation r, TypedIndex from) const;

  /// Neighbours of a node of a given type across all relations, as indices.
  std::vector<std::size_t> typed_neighbor_indices(TypedIndex from, NodeType neighbor_type) const;

  /// Per-user labels aligned with the user index space (nullopt = unlabeled).
  std::vector<std::optional<Label>> user_labels() const;

 private:
  friend HeteroGraph build_graph(std::vector<NodeRecord>, std::vector<EdgeRecord>,
                                 std::map<std::string, Label>);
  static std::size_t idx(NodeType t) { return static_cast<std::size_t>(t); }

  std::vector<NodeRecord> nodes_;
  std::unordered_map<std::string, std::size_t> position_;
  std::array<std::vector<std::size_t>, kNumNodeTypes> by_type_;
  std::vector<std::size_t> type_index_;
  std::vector<EdgeRecord> edges_;
  std::array<std::size_t, kNumRelations> edge_counts_{};
  std::map<std::string, Label> labels_;
  // [relation][direction]: direction 0 = src->dst, 1 = dst->src.
  std::array<std::array<Csr, 2>, kNumRelations> rel_adj_;
};

/// Validates and freezes a graph. Edges may be given in either orientation;
/// they are stored canonically. Exact duplicate edges collapse to one.
HeteroGraph build_graph(std::vector<NodeRecord> nodes, std::vector<EdgeRecord> edges,
                        std::map<std::string, Label> labels);

enum class MetaPath : std::uint8_t { kUTU = 0, kUTKTU = 1, kUKU = 2 };
inline constexpr std::size_t kNumMetaPaths = 3;
inline constexpr std::array<MetaPath, kNumMetaPaths> kAllMetaPaths = {
    MetaPath::kUTU, MetaPath::kUTKTU, MetaPath::kUKU};

std::string_view to_string(MetaPath p);
MetaPath parse_metapath(std::string_view s);
/// Node type sequence of a meta-path, e.g. UTU = {user, tweet, user}.
std::vector<NodeType> metapath_types(MetaPath p);

/// Boolean user x user adjacency: (i, j) set iff a path instance of the
/// meta-path joins i and j, i != j. User-tweet hops use R2 and R3; tweet-keyword
/// hops use R5 and R6; user-keyword hops use R4.
struct SparseAdjacency {
  MetaPath path = MetaPath::kUTU;
  Csr rows;
  std::size_t dim() const { return rows.rows(); }
  bool has(std::size_t i, std::size_t j) const;
};

SparseAdjacency metapath_adjacency(const HeteroGraph& g, MetaPath p);
SparseAdjacency metapath_adjacency(const HeteroGraph& g, std::string_view name);

/// Class imbalance ratio |class ci| / |class cj| over labeled users.
double cir(const HeteroGraph& g, Label ci, Label cj);

struct SplitAssignment {
  std::vector<std::string> train;
  std::vector<std::string> val;
  std::vector<std::string> test;
  double train_frac = 0.0;
  double val_frac = 0.0;
  std::uint64_t seed = 0;
};

/// Per-class stratified split of labeled users; each partition receives
/// round(frac * class size) nodes of each class (at least one).
SplitAssignment stratified_split(const HeteroGraph& g, double train_frac, double val_frac,
                                 std::uint64_t seed);

/// Sorted, de-duplicated ids of `node_id`'s neighbours of the given type.
std::vector<std::string> typed_neighbors(const HeteroGraph& g, std::string_view node_id,
                                         NodeType neighbor_type);

}  // namespace hetgdt
