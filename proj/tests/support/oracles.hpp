// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

// Independent reference implementations used by unit and acceptance tests.
// Nothing here calls into the code under test except for graph accessors.

#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hetgdt/hetgraph.hpp"
#include "hetgdt/num/tape.hpp"

namespace hetgdt::testing {

/// Random small typed graph with every relation populated at `density`.
inline HeteroGraph random_graph(std::uint64_t seed, std::size_t max_nodes, double density = 0.15) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> count(1, std::max<std::size_t>(1, max_nodes / 3));
  const std::size_t nu = count(rng), nt = count(rng), nk = count(rng);
  std::vector<NodeRecord> nodes;
  for (std::size_t i = 0; i < nu; ++i) nodes.push_back({"u" + std::to_string(i), NodeType::kUser, ""});
  for (std::size_t i = 0; i < nt; ++i) nodes.push_back({"t" + std::to_string(i), NodeType::kTweet, ""});
  for (std::size_t i = 0; i < nk; ++i) nodes.push_back({"k" + std::to_string(i), NodeType::kKeyword, ""});
  std::bernoulli_distribution coin(density);
  std::vector<EdgeRecord> edges;
  auto link = [&](const char* a, std::size_t na, const char* b, std::size_t nb, Relation r) {
    for (std::size_t i = 0; i < na; ++i)
      for (std::size_t j = 0; j < nb; ++j) {
        if (r == Relation::kR1 && i == j) continue;
        if (coin(rng)) edges.push_back({a + std::to_string(i), b + std::to_string(j), r});
      }
  };
  link("u", nu, "u", nu, Relation::kR1);
  link("u", nu, "t", nt, Relation::kR2);
  link("u", nu, "t", nt, Relation::kR3);
  link("u", nu, "k", nk, Relation::kR4);
  link("t", nt, "k", nk, Relation::kR5);
  link("t", nt, "k", nk, Relation::kR6);
  return build_graph(std::move(nodes), std::move(edges), {});
}

/// Meta-path pairs by explicit enumeration of typed walks over the edge list.
inline std::set<std::pair<std::size_t, std::size_t>> brute_force_metapath(const HeteroGraph& g,
                                                                         MetaPath p) {
  // Undirected typed adjacency restricted to the relations each hop may use.
  auto hop_ok = [](NodeType a, NodeType b, Relation r) {
    auto [s, d] = signature(r);
    if (!((s == a && d == b) || (s == b && d == a))) return false;
    return r != Relation::kR1;  // follow edges are not part of any meta-path
  };
  std::vector<std::string> ids;
  for (const auto& n : g.nodes()) ids.push_back(n.id);
  const auto types = metapath_types(p);
  std::set<std::pair<std::size_t, std::size_t>> out;
  std::function<void(const std::string&, std::size_t, const std::string&)> walk =
      [&](const std::string& start, std::size_t depth, const std::string& at) {
        if (depth + 1 == types.size()) {
          if (at != start) out.insert({g.index_of(start).index, g.index_of(at).index});
          return;
        }
        for (const auto& e : g.edges()) {
          std::string next;
          if (e.src == at) next = e.dst;
          else if (e.dst == at) next = e.src;
          else continue;
          if (g.node(next).type != types[depth + 1]) continue;
          if (!hop_ok(types[depth], types[depth + 1], e.rel)) continue;
          walk(start, depth + 1, next);
        }
      };
  for (const auto& n : g.nodes())
    if (n.type == NodeType::kUser) walk(n.id, 0, n.id);
  return out;
}

struct Confusion {
  double tp = 0, fp = 0, fn = 0, tn = 0;  // with participant (1) as positive
};

inline Confusion confusion(const std::vector<int>& y, const std::vector<int>& p) {
  Confusion c;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] == 1 && p[i] == 1) c.tp += 1;
    else if (y[i] == 0 && p[i] == 1) c.fp += 1;
    else if (y[i] == 1 && p[i] == 0) c.fn += 1;
    else c.tn += 1;
  }
  return c;
}

inline double f1_of(double tp, double fp, double fn) {
  const double prec = tp + fp > 0 ? tp / (tp + fp) : 0.0;
  const double rec = tp + fn > 0 ? tp / (tp + fn) : 0.0;
  return prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
}

inline double oracle_macro_f1(const std::vector<int>& y, const std::vector<int>& p) {
  auto c = confusion(y, p);
  return 50.0 * (f1_of(c.tp, c.fp, c.fn) + f1_of(c.tn, c.fn, c.fp));
}

inline double oracle_gmean(const std::vector<int>& y, const std::vector<int>& p) {
  auto c = confusion(y, p);
  const double sens = c.tp + c.fn > 0 ? c.tp / (c.tp + c.fn) : 0.0;
  const double spec = c.tn + c.fp > 0 ? c.tn / (c.tn + c.fp) : 0.0;
  return 100.0 * std::sqrt(sens * spec);
}

/// Worst relative error between analytic gradients (already in each
/// parameter's grad slot) and central differences of `loss`.
inline double max_fd_rel_error(const std::vector<num::Parameter*>& params,
                               const std::function<double()>& loss, double eps = 1e-5,
                               double skip_below = 1e-8) {
  double worst = 0.0;
  for (auto* p : params) {
    for (Eigen::Index i = 0; i < p->value.size(); ++i) {
      const double analytic = p->grad.data()[i];
      const double saved = p->value.data()[i];
      p->value.data()[i] = saved + eps;
      const double up = loss();
      p->value.data()[i] = saved - eps;
      const double down = loss();
      p->value.data()[i] = saved;
      const double numeric = (up - down) / (2 * eps);
      if (std::abs(analytic) < skip_below && std::abs(numeric) < skip_below) continue;
      const double rel = std::abs(analytic - numeric) /
                         std::max({std::abs(analytic), std::abs(numeric), 1e-8});
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

}  // namespace hetgdt::testing
