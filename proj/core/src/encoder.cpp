// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetgdt/encoder.hpp"

#include <cmath>

#include "hetgdt/num/init.hpp"
#include "hetgdt/num/rng.hpp"

namespace hetgdt::encoder {

namespace {

using num::InitScheme;

std::string type_name(NodeType t) { return std::string(to_string(t)); }
std::string path_name(MetaPath p) { return std::string(to_string(p)); }

void add_param(num::ParamStore& store, const std::string& name, Eigen::Index rows,
               Eigen::Index cols, InitScheme scheme, std::uint64_t seed) {
  store.add(name, num::init_params(rows, cols, scheme, num::derive_seed(seed, name)));
}

void add_const(num::ParamStore& store, const std::string& name, Eigen::Index cols, double v) {
  store.add(name, Matrix::Constant(1, cols, v));
}

}  // namespace

void EncoderConfig::validate() const {
  for (auto d : in_dims)
    if (d <= 0) throw num::NumError("encoder: input dims must be positive");
  if (hidden_dim <= 0) throw num::NumError("encoder: hidden_dim must be positive");
  if (layers < 1) throw num::NumError("encoder: layers must be >= 1");
  if (dropout < 0.0 || dropout >= 1.0) throw num::NumError("encoder: dropout must be in [0, 1)");
}

num::SparseMatrix gcn_normalize(const Csr& adjacency) {
  const auto n = static_cast<Eigen::Index>(adjacency.rows());
  std::vector<double> inv_sqrt(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < adjacency.rows(); ++i)
    inv_sqrt[i] = 1.0 / std::sqrt(static_cast<double>(adjacency.row(i).size() + 1));
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(adjacency.nnz() + adjacency.rows());
  for (std::size_t i = 0; i < adjacency.rows(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    trips.emplace_back(r, r, inv_sqrt[i] * inv_sqrt[i]);
    for (auto j : adjacency.row(i))
      trips.emplace_back(r, static_cast<Eigen::Index>(j), inv_sqrt[i] * inv_sqrt[j]);
  }
  num::SparseMatrix out(n, n);
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

GraphContext make_context(const HeteroGraph& g) {
  GraphContext ctx;
  for (auto t : kAllNodeTypes) ctx.counts[static_cast<std::size_t>(t)] = g.num_nodes(t);
  for (auto p : kAllMetaPaths) {
    auto adj = metapath_adjacency(g, p);
    const auto k = static_cast<std::size_t>(p);
    ctx.metapath_norm[k] = std::make_shared<const num::SparseMatrix>(gcn_normalize(adj.rows));
    ctx.metapath_rows[k] = std::make_shared<const Csr>(std::move(adj.rows));
  }
  const std::size_t nu = g.num_nodes(NodeType::kUser);
  for (auto t : kAllNodeTypes) {
    std::vector<std::vector<std::size_t>> rows(nu);
    for (std::size_t i = 0; i < nu; ++i)
      rows[i] = g.typed_neighbor_indices({NodeType::kUser, i}, t);
    ctx.schema_rows[static_cast<std::size_t>(t)] = std::make_shared<const Csr>(Csr::from_rows(rows));
  }
  return ctx;
}

void init_semantic_params(num::ParamStore& store, const std::string& prefix, Eigen::Index dim,
                          std::uint64_t seed) {
  add_param(store, prefix + ".W", dim, dim, InitScheme::kXavierUniform, seed);
  add_param(store, prefix + ".b", 1, dim, InitScheme::kZeros, seed);
  add_param(store, prefix + ".q", dim, 1, InitScheme::kXavierUniform, seed);
}

void init_encoder_params(num::ParamStore& store, const EncoderConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const auto d = cfg.hidden_dim;
  for (auto t : kAllNodeTypes) {
    const auto base = "enc.proj." + type_name(t);
    add_param(store, base + ".W", cfg.in_dims[static_cast<std::size_t>(t)], d,
              InitScheme::kXavierUniform, seed);
    add_param(store, base + ".b", 1, d, InitScheme::kZeros, seed);
  }
  for (auto p : kAllMetaPaths) {
    for (int l = 0; l < cfg.layers; ++l) {
      const auto base = "enc.mp." + path_name(p) + "." + std::to_string(l);
      add_param(store, base + ".W", d, d, InitScheme::kXavierUniform, seed);
      add_param(store, base + ".b", 1, d, InitScheme::kZeros, seed);
      if (cfg.layer_norm) {
        add_const(store, base + ".ln.g", d, 1.0);
        add_const(store, base + ".ln.b", d, 0.0);
      }
    }
  }
  init_semantic_params(store, "enc.mp.sem", d, seed);
  for (auto t : kAllNodeTypes) {
    const auto base = "enc.sc." + type_name(t);
    add_param(store, base + ".a_self", d, 1, InitScheme::kXavierUniform, seed);
    add_param(store, base + ".a_nb", d, 1, InitScheme::kXavierUniform, seed);
  }
  init_semantic_params(store, "enc.sc.sem", d, seed);
}

TypeVars project_features(num::Binder& params, const EncoderConfig& cfg, const TypeVars& raw,
                          const Mode& mode) {
  TypeVars out;
  for (auto t : kAllNodeTypes) {
    const auto k = static_cast<std::size_t>(t);
    const Var x = raw[k];
    if (x.cols() != cfg.in_dims[k])
      throw num::NumError("project_features: " + type_name(t) + " features have " +
                          std::to_string(x.cols()) + " columns, expected " +
                          std::to_string(cfg.in_dims[k]));
    const auto base = "enc.proj." + type_name(t);
    Var h = num::add_bias(num::matmul(x, params(base + ".W")), params(base + ".b"));
    out[k] = num::dropout(h, cfg.dropout, {mode.seed, mode.epoch, 100 + k}, mode.train);
  }
  return out;
}

Var semantic_attention(num::Binder& params, const std::string& prefix,
                       const std::vector<Var>& branches, num::AttentionLog* log) {
  if (branches.empty()) throw num::NumError("semantic_attention: no branches");
  const Var w = params(prefix + ".W");
  const Var b = params(prefix + ".b");
  const Var q = params(prefix + ".q");
  std::vector<Var> scores;
  scores.reserve(branches.size());
  for (const auto& h : branches)
    scores.push_back(num::mean_all(num::matmul(num::tanh(num::add_bias(num::matmul(h, w), b)), q)));
  const Var beta = num::softmax_rows(num::concat_cols(scores));
  if (log != nullptr) {
    const auto& v = beta.value();
    log->distributions.emplace_back(v.data(), v.data() + v.size());
  }
  Var out;
  for (std::size_t p = 0; p < branches.size(); ++p) {
    Var term = num::mul_scalar(branches[p], num::pick(beta, 0, static_cast<Eigen::Index>(p)));
    out = out.valid() ? num::add(out, term) : term;
  }
  return out;
}

Var encode_metapath_view(num::Binder& params, const EncoderConfig& cfg, const GraphContext& ctx,
                         Var users, const Mode& mode) {
  if (users.rows() == 0) throw num::NumError("encode_metapath_view: empty user set");
  if (static_cast<std::size_t>(users.rows()) != ctx.counts[0])
    throw num::NumError("encode_metapath_view: user row count does not match graph");
  std::vector<Var> branches;
  for (auto p : kAllMetaPaths) {
    const auto k = static_cast<std::size_t>(p);
    Var h = users;
    for (int l = 0; l < cfg.layers; ++l) {
      const auto base = "enc.mp." + path_name(p) + "." + std::to_string(l);
      h = num::add_bias(num::spmm(ctx.metapath_norm[k], num::matmul(h, params(base + ".W"))),
                        params(base + ".b"));
      if (cfg.layer_norm) h = num::layer_norm_rows(h, params(base + ".ln.g"), params(base + ".ln.b"));
      h = num::elu(h);
    }
    branches.push_back(h);
  }
  return semantic_attention(params, "enc.mp.sem", branches, mode.log);
}

Var encode_schema_view(num::Binder& params, const EncoderConfig& cfg, const GraphContext& ctx,
                       const TypeVars& projected, const Mode& mode) {
  (void)cfg;
  const Var users = projected[0];
  if (users.rows() == 0) throw num::NumError("encode_schema_view: empty user set");
  std::vector<Var> branches;
  for (auto t : kAllNodeTypes) {
    const auto k = static_cast<std::size_t>(t);
    const auto base = "enc.sc." + type_name(t);
    const Var owner = num::matmul(users, params(base + ".a_self"));
    const Var elem = num::matmul(projected[k], params(base + ".a_nb"));
    Var agg = num::segment_attention(ctx.schema_rows[k], owner, elem, projected[k],
                                     num::ScoreActivation::kTanh, mode.log);
    branches.push_back(num::elu(agg));
  }
  return semantic_attention(params, "enc.sc.sem", branches, mode.log);
}

Views encode(num::Binder& params, const EncoderConfig& cfg, const GraphContext& ctx,
             const TypeVars& raw, const Mode& mode) {
  auto projected = project_features(params, cfg, raw, mode);
  Views v;
  v.mp = encode_metapath_view(params, cfg, ctx, projected[0], mode);
  v.sc = encode_schema_view(params, cfg, ctx, projected, mode);
  return v;
}

Var encode_target(num::Binder& params, const EncoderConfig& cfg, const GraphContext& ctx,
                  const TypeVars& raw, const Mode& mode) {
  if (raw[0].cols() != cfg.in_dims[0])
    throw num::NumError("encode_target: user feature width mismatch");
  const auto base = std::string("enc.proj.user");
  Var h = num::add_bias(num::matmul(raw[0], params(base + ".W")), params(base + ".b"));
  h = num::dropout(h, cfg.dropout, {mode.seed, mode.epoch, 100}, mode.train);
  return encode_metapath_view(params, cfg, ctx, h, mode);
}

}  // namespace hetgdt::encoder
