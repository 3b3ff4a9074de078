// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "hetgdt/hetgraph.hpp"
#include "hetgdt/num/binder.hpp"
#include "hetgdt/num/ops.hpp"

namespace hetgdt::encoder {

using num::Matrix;
using num::Var;

/// Raw attribute features, one matrix per node type in type-index order.
using TypeFeatures = std::array<Matrix, kNumNodeTypes>;
using TypeVars = std::array<Var, kNumNodeTypes>;

struct EncoderConfig {
  std::array<Eigen::Index, kNumNodeTypes> in_dims{384, 384, 384};
  Eigen::Index hidden_dim = 256;
  int layers = 3;
  double dropout = 0.1;
  bool layer_norm = true;

  void validate() const;
};

/// Graph-derived constants both views consume. Built once per graph.
struct GraphContext {
  std::array<std::size_t, kNumNodeTypes> counts{};
  /// D^-1/2 (A + I) D^-1/2 per meta-path, in kAllMetaPaths order.
  std::array<std::shared_ptr<const num::SparseMatrix>, kNumMetaPaths> metapath_norm;
  /// Raw meta-path neighbour lists (no self-loops).
  std::array<std::shared_ptr<const Csr>, kNumMetaPaths> metapath_rows;
  /// Per user, its neighbours of each type (indices into that type's space).
  std::array<std::shared_ptr<const Csr>, kNumNodeTypes> schema_rows;
};

GraphContext make_context(const HeteroGraph& g);

/// Symmetric normalization with self-loops of a boolean adjacency.
num::SparseMatrix gcn_normalize(const Csr& adjacency);

/// Adds every encoder parameter to `store` under the "enc." prefix.
void init_encoder_params(num::ParamStore& store, const EncoderConfig& cfg, std::uint64_t seed);

/// Forward-pass switches. Dropout is active only when `train` is set.
struct Mode {
  bool train = false;
  std::uint64_t seed = 0;
  std::uint64_t epoch = 0;
  num::AttentionLog* log = nullptr;
};

/// X~ = X W + b per type (followed by dropout in training mode).
TypeVars project_features(num::Binder& params, const EncoderConfig& cfg, const TypeVars& raw,
                          const Mode& mode);

/// Per meta-path GCN stack fused by semantic attention; one row per user.
Var encode_metapath_view(num::Binder& params, const EncoderConfig& cfg, const GraphContext& ctx,
                         Var users, const Mode& mode);

/// Per neighbour-type attention aggregation fused by type-level attention.
Var encode_schema_view(num::Binder& params, const EncoderConfig& cfg, const GraphContext& ctx,
                       const TypeVars& projected, const Mode& mode);

/// Semantic attention: w_p = mean_i q^T tanh(H_p W + b), beta = softmax(w),
/// output sum_p beta_p H_p. Parameters live under `prefix` (.W, .b, .q).
Var semantic_attention(num::Binder& params, const std::string& prefix,
                       const std::vector<Var>& branches, num::AttentionLog* log);
void init_semantic_params(num::ParamStore& store, const std::string& prefix, Eigen::Index dim,
                          std::uint64_t seed);

struct Views {
  Var mp;
  Var sc;
};

/// Projection followed by both views.
Views encode(num::Binder& params, const EncoderConfig& cfg, const GraphContext& ctx,
             const TypeVars& raw, const Mode& mode);

/// z^mp only; the schema view is skipped.
Var encode_target(num::Binder& params, const EncoderConfig& cfg, const GraphContext& ctx,
                  const TypeVars& raw, const Mode& mode);

}  // namespace hetgdt::encoder
