// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

// Small hand-built graphs and feature helpers shared by unit tests.

#pragma once

#include <map>
#include <random>
#include <string>
#include <vector>

#include "hetgdt/encoder.hpp"
#include "hetgdt/hetgraph.hpp"

namespace hetgdt::testing {

inline num::Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng,
                                 double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  num::Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

inline encoder::TypeFeatures random_features(const HeteroGraph& g,
                                             const std::array<Eigen::Index, kNumNodeTypes>& dims,
                                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  encoder::TypeFeatures f;
  for (auto t : kAllNodeTypes) {
    const auto k = static_cast<std::size_t>(t);
    f[k] = random_matrix(static_cast<Eigen::Index>(g.num_nodes(t)), dims[k], rng);
  }
  return f;
}

inline encoder::TypeVars constants(num::Tape& tape, const encoder::TypeFeatures& f) {
  encoder::TypeVars v;
  for (std::size_t k = 0; k < kNumNodeTypes; ++k) v[k] = tape.constant(f[k]);
  return v;
}

/// Six users, four tweets, three keywords with every relation present.
/// Users u0..u2 are participants, u3..u5 benign.
inline HeteroGraph small_graph() {
  std::vector<NodeRecord> nodes;
  for (int i = 0; i < 6; ++i) nodes.push_back({"u" + std::to_string(i), NodeType::kUser, "user " + std::to_string(i)});
  for (int i = 0; i < 4; ++i) nodes.push_back({"t" + std::to_string(i), NodeType::kTweet, "tweet " + std::to_string(i)});
  for (int i = 0; i < 3; ++i) nodes.push_back({"k" + std::to_string(i), NodeType::kKeyword, "kw" + std::to_string(i)});
  std::vector<EdgeRecord> edges = {
      {"u0", "u1", Relation::kR1}, {"u1", "u2", Relation::kR1}, {"u3", "u4", Relation::kR1},
      {"u0", "t0", Relation::kR2}, {"u1", "t1", Relation::kR2}, {"u3", "t2", Relation::kR2},
      {"u4", "t3", Relation::kR2}, {"u2", "t0", Relation::kR3}, {"u5", "t2", Relation::kR3},
      {"u0", "k0", Relation::kR4}, {"u2", "k0", Relation::kR4}, {"u4", "k2", Relation::kR4},
      {"t0", "k0", Relation::kR5}, {"t1", "k0", Relation::kR6}, {"t2", "k1", Relation::kR5},
      {"t3", "k1", Relation::kR5},
  };
  std::map<std::string, Label> labels;
  for (int i = 0; i < 6; ++i)
    labels["u" + std::to_string(i)] = i < 3 ? Label::kParticipant : Label::kBenign;
  return build_graph(std::move(nodes), std::move(edges), std::move(labels));
}

}  // namespace hetgdt::testing
