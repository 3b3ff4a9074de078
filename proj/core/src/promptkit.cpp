// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetgdt/promptkit.hpp"

#include <cmath>
#include <optional>
#include <set>
#include <unordered_set>

#include "hetgdt/num/adam.hpp"
#include "hetgdt/num/init.hpp"
#include "hetgdt/num/rng.hpp"

namespace hetgdt::prompt {

namespace {

using num::InitScheme;

void add_param(num::ParamStore& store, const std::string& name, Eigen::Index rows,
               Eigen::Index cols, InitScheme scheme, std::uint64_t seed) {
  store.add(name, num::init_params(rows, cols, scheme, num::derive_seed(seed, name)));
}

std::string type_name(NodeType t) { return std::string(to_string(t)); }

/// d x h indicator: column k sums the k-th block of d / h coordinates.
Matrix head_blocks(Eigen::Index d, int heads) {
  Matrix b = Matrix::Zero(d, heads);
  const Eigen::Index block = d / heads;
  for (int k = 0; k < heads; ++k) b.block(k * block, k, block, 1).setOnes();
  return b;
}

Var project(num::Binder& p, const PromptConfig& cfg, Var x) {
  if (!cfg.projection) return x;
  Var hidden = num::tanh(num::add_bias(num::matmul(x, p("prompt.proj.W1")), p("prompt.proj.b1")));
  return num::add(x, num::add_bias(num::matmul(hidden, p("prompt.proj.W2")), p("prompt.proj.b2")));
}

std::vector<num::Parameter*> trainable(num::ParamStore& store, const PromptConfig& cfg) {
  std::vector<num::Parameter*> out;
  auto take = [&](std::string_view prefix) {
    for (auto* p : store.with_prefix(prefix)) out.push_back(p);
  };
  if (cfg.node_prompt) {
    take("prompt.F.participant");
    take("prompt.F.benign");
    take("prompt.node_pma.");
  }
  if (cfg.structure_prompt) {
    take("prompt.struct_pma.");
    take("prompt.sem.");
  }
  if (cfg.projection) take("prompt.proj.");
  if (cfg.head == Head::kPrototype) take("prompt.C");
  else take("prompt.head.");
  return out;
}

std::vector<int> target_rows(const std::vector<Label>& labels) {
  std::vector<int> out;
  out.reserve(labels.size());
  for (auto l : labels) out.push_back(prototype_row(l));
  return out;
}

Label decide(double participant_score, double benign_score) {
  return participant_score >= benign_score ? Label::kParticipant : Label::kBenign;
}

Var attention_weights(Var x, Var tokens, num::AttentionLog* log) {
  if (tokens.rows() < 1) throw num::NumError("attention_combine: no tokens");
  if (x.cols() != tokens.cols()) throw num::NumError("attention_combine: dimension mismatch");
  Var weights = num::softmax_rows(num::tanh(num::matmul_nt(x, tokens)));
  if (log != nullptr) {
    const auto& w = weights.value();
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      std::vector<double> row(static_cast<std::size_t>(w.cols()));
      for (Eigen::Index k = 0; k < w.cols(); ++k) row[static_cast<std::size_t>(k)] = w(i, k);
      log->distributions.push_back(std::move(row));
    }
  }
  return weights;
}

/// PMA given already projected keys and values of the set elements.
Var pma_from_kv(num::Binder& params, const std::string& prefix, int heads, Var keys, Var values,
                const std::shared_ptr<const Csr>& segments, num::AttentionLog* log) {
  const auto d = values.cols();
  if (heads < 1 || d % heads != 0) throw num::NumError("pma_pool: dim not divisible by heads");
  auto& tape = values.tape();
  const Var psi = params(prefix + ".psi");
  const Var scores = num::matmul(num::mul_row(keys, psi), tape.constant(head_blocks(d, heads)));
  const Var mh = num::segment_attention(segments, Var(), scores, values, num::ScoreActivation::kNone, log);
  const Var q = num::layer_norm_rows(num::add_bias(mh, psi), params(prefix + ".ln1.g"),
                                     params(prefix + ".ln1.b"));
  const Var mlp = num::add_bias(
      num::matmul(num::elu(num::add_bias(num::matmul(q, params(prefix + ".W1")), params(prefix + ".b1"))),
                  params(prefix + ".W2")),
      params(prefix + ".b2"));
  const Var out = num::layer_norm_rows(num::add(q, mlp), params(prefix + ".ln2.g"),
                                       params(prefix + ".ln2.b"));
  std::vector<double> mask(segments->rows(), 1.0);
  bool any_empty = false;
  for (std::size_t i = 0; i < segments->rows(); ++i)
    if (segments->row(i).empty()) {
      mask[i] = 0.0;
      any_empty = true;
    }
  return any_empty ? num::mask_rows(out, std::move(mask)) : out;
}

double val_macro_f1(const Matrix& logits, const TuneData& data) {
  if (data.val_rows.empty()) return 0.0;
  std::vector<int> y, p;
  for (std::size_t i = 0; i < data.val_rows.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(data.val_rows[i]);
    y.push_back(static_cast<int>(data.val_labels[i]));
    p.push_back(static_cast<int>(decide(logits(r, kParticipantRow), logits(r, kBenignRow))));
  }
  return eval::macro_f1(y, p);
}

}  // namespace

int prototype_row(Label l) {
  return static_cast<int>(l == Label::kParticipant ? kParticipantRow : kBenignRow);
}

Label label_of_row(Eigen::Index row) {
  return row == kParticipantRow ? Label::kParticipant : Label::kBenign;
}

void PromptConfig::validate() const {
  if (tokens < 1) throw num::NumError("prompt: K must be >= 1");
  if (heads < 1) throw num::NumError("prompt: heads must be >= 1");
  if (!(tau > 0.0)) throw num::NumError("prompt: tau must be > 0");
  if (delta < 0.0 || lambda < 0.0) throw num::NumError("prompt: delta and lambda must be >= 0");
  if (epochs < 0) throw num::NumError("prompt: epochs must be >= 0");
  if (!(lr > 0.0) || weight_decay < 0.0) throw num::NumError("prompt: bad optimizer settings");
}

void init_pma_params(num::ParamStore& store, const std::string& prefix, Eigen::Index dim,
                     std::uint64_t seed) {
  add_param(store, prefix + ".psi", 1, dim, InitScheme::kXavierUniform, seed);
  add_param(store, prefix + ".WK", dim, dim, InitScheme::kXavierUniform, seed);
  add_param(store, prefix + ".WV", dim, dim, InitScheme::kXavierUniform, seed);
  add_param(store, prefix + ".ln1.g", 1, dim, InitScheme::kZeros, seed);
  store.at(prefix + ".ln1.g").value.setOnes();
  add_param(store, prefix + ".ln1.b", 1, dim, InitScheme::kZeros, seed);
  add_param(store, prefix + ".W1", dim, dim, InitScheme::kXavierUniform, seed);
  add_param(store, prefix + ".b1", 1, dim, InitScheme::kZeros, seed);
  add_param(store, prefix + ".W2", dim, dim, InitScheme::kXavierUniform, seed);
  add_param(store, prefix + ".b2", 1, dim, InitScheme::kZeros, seed);
  add_param(store, prefix + ".ln2.g", 1, dim, InitScheme::kZeros, seed);
  store.at(prefix + ".ln2.g").value.setOnes();
  add_param(store, prefix + ".ln2.b", 1, dim, InitScheme::kZeros, seed);
}

void init_prompt_params(num::ParamStore& store, const PromptConfig& cfg, const PromptShapes& shapes,
                        std::uint64_t seed) {
  cfg.validate();
  const auto du = shapes.feature_dims[0];
  const auto d = shapes.embed_dim;
  if (du % cfg.heads != 0 || d % cfg.heads != 0)
    throw num::NumError("prompt: feature and embedding dims must be divisible by the head count");
  add_param(store, "prompt.F.participant", cfg.tokens, du, InitScheme::kXavierUniform, seed);
  add_param(store, "prompt.F.benign", cfg.tokens, du, InitScheme::kXavierUniform, seed);
  for (auto t : {NodeType::kTweet, NodeType::kKeyword})
    add_param(store, "prompt.F." + type_name(t), cfg.tokens,
              shapes.feature_dims[static_cast<std::size_t>(t)], InitScheme::kXavierUniform, seed);
  init_pma_params(store, "prompt.node_pma", du, seed);
  // The user prompt starts switched off (X^ = X) and grows through this gain.
  store.at("prompt.node_pma.ln2.g").value.setZero();
  init_pma_params(store, "prompt.struct_pma", d, seed);
  encoder::init_semantic_params(store, "prompt.sem", d, seed);
  add_param(store, "prompt.proj.W1", d, d, InitScheme::kXavierUniform, seed);
  add_param(store, "prompt.proj.b1", 1, d, InitScheme::kZeros, seed);
  add_param(store, "prompt.proj.W2", d, d, InitScheme::kZeros, seed);
  add_param(store, "prompt.proj.b2", 1, d, InitScheme::kZeros, seed);
  add_param(store, "prompt.C", 2, d, InitScheme::kZeros, seed);
  add_param(store, "prompt.head.W", d, 2, InitScheme::kXavierUniform, seed);
  add_param(store, "prompt.head.b", 1, 2, InitScheme::kZeros, seed);
}

Var attention_combine(Var x, Var tokens, num::AttentionLog* log) {
  return num::matmul(attention_weights(x, tokens, log), tokens);
}

Var pma_pool(num::Binder& params, const std::string& prefix, int heads, Var elements,
             std::shared_ptr<const Csr> segments, num::AttentionLog* log) {
  const Var keys = num::matmul(elements, params(prefix + ".WK"));
  const Var values = num::matmul(elements, params(prefix + ".WV"));
  return pma_from_kv(params, prefix, heads, keys, values, segments, log);
}

Var apply_user_prompt(num::Binder& params, const PromptConfig& cfg, Var users,
                      num::AttentionLog* log) {
  const auto n = static_cast<std::size_t>(users.rows());
  // Att(X, F) W = softmax(.) (F W): project the K tokens instead of the N rows.
  const Var wk = params("prompt.node_pma.WK");
  const Var wv = params("prompt.node_pma.WV");
  std::vector<Var> keys, values;
  for (const char* bank : {"prompt.F.participant", "prompt.F.benign"}) {
    const Var tokens = params(bank);
    const Var w = attention_weights(users, tokens, log);
    keys.push_back(num::matmul(w, num::matmul(tokens, wk)));
    values.push_back(num::matmul(w, num::matmul(tokens, wv)));
  }
  std::vector<std::vector<std::size_t>> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = {i, n + i};
  auto seg = std::make_shared<const Csr>(Csr::from_rows(rows));
  return num::add(users, pma_from_kv(params, "prompt.node_pma", cfg.heads, num::concat_rows(keys),
                                     num::concat_rows(values), seg, log));
}

encoder::TypeVars apply_node_prompt(num::Binder& params, const PromptConfig& cfg,
                                    const encoder::TypeVars& raw, num::AttentionLog* log) {
  encoder::TypeVars out;
  for (auto t : kAllNodeTypes) {
    const auto k = static_cast<std::size_t>(t);
    if (!raw[k].valid()) continue;
    if (t == NodeType::kUser) {
      out[k] = apply_user_prompt(params, cfg, raw[k], log);
      continue;
    }
    const auto name = "prompt.F." + type_name(t);
    if (!params.store().contains(name))
      throw num::NumError("apply_node_prompt: no token bank for type " + type_name(t));
    out[k] = raw[k].rows() == 0 ? raw[k] : num::add(raw[k], attention_combine(raw[k], params(name), log));
  }
  return out;
}

Var structure_prompt(num::Binder& params, const PromptConfig& cfg, const encoder::GraphContext& ctx,
                     Var z, num::AttentionLog* log) {
  // One shared PMA: keys and values of Z serve every meta-path.
  const Var keys = num::matmul(z, params("prompt.struct_pma.WK"));
  const Var values = num::matmul(z, params("prompt.struct_pma.WV"));
  std::vector<Var> branches;
  for (auto p : kAllMetaPaths)
    branches.push_back(pma_from_kv(params, "prompt.struct_pma", cfg.heads, keys, values,
                                   ctx.metapath_rows[static_cast<std::size_t>(p)], log));
  return encoder::semantic_attention(params, "prompt.sem", branches, log);
}

Matrix init_prototypes(const Matrix& z, const std::vector<std::size_t>& rows,
                       const std::vector<Label>& labels) {
  if (rows.size() != labels.size()) throw num::NumError("init_prototypes: rows and labels differ");
  Matrix c = Matrix::Zero(2, z.cols());
  std::array<std::size_t, 2> count{};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = prototype_row(labels[i]);
    c.row(r) += z.row(static_cast<Eigen::Index>(rows[i]));
    ++count[static_cast<std::size_t>(r)];
  }
  if (count[0] == 0 || count[1] == 0)
    throw num::NumError("init_prototypes: each class needs at least one labeled node");
  for (int r = 0; r < 2; ++r) c.row(r) /= static_cast<double>(count[static_cast<std::size_t>(r)]);
  return c;
}

Var orthogonality_loss(Var c) {
  const auto n = c.rows();
  return num::frobenius_sq(num::sub(num::matmul_nt(c, c), c.tape().constant(Matrix::Identity(n, n))));
}

Var tuning_loss(Var z_prime, Var c, const std::vector<int>& target_rows, double tau, double lambda,
                Var c_orth) {
  if (!(tau > 0.0)) throw num::NumError("tuning_loss: tau must be > 0");
  Var ce = num::cross_entropy(num::scale(num::cosine_similarity(z_prime, c), 1.0 / tau), target_rows);
  if (lambda == 0.0) return ce;
  return num::add(ce, num::scale(orthogonality_loss(c_orth), lambda));
}

Label predict(const Eigen::RowVectorXd& z, const Matrix& c) {
  const double zn = z.norm();
  if (zn == 0.0) throw num::NumError("predict: zero-norm embedding");
  const double sp = z.dot(c.row(kParticipantRow)) / (zn * c.row(kParticipantRow).norm());
  const double sb = z.dot(c.row(kBenignRow)) / (zn * c.row(kBenignRow).norm());
  return decide(sp, sb);
}

TuneData make_tune_data(const HeteroGraph& g, encoder::TypeFeatures features,
                        const SplitAssignment& split) {
  TuneData d;
  d.graph = &g;
  d.features = std::move(features);
  d.ctx = encoder::make_context(g);
  std::unordered_set<std::string> base(split.train.begin(), split.train.end());
  base.insert(split.val.begin(), split.val.end());
  base.insert(split.test.begin(), split.test.end());
  auto add = [&](const std::string& id, std::vector<std::size_t>& rows, std::vector<Label>& labels) {
    if (!g.contains(id)) throw GraphError("split names unknown node " + id);
    auto l = g.label(id);
    if (!l) throw GraphError("split node " + id + " is unlabeled");
    rows.push_back(g.index_of(id).index);
    labels.push_back(*l);
  };
  for (const auto& id : split.train) add(id, d.train_rows, d.train_labels);
  for (const auto& [id, label] : g.labels())
    if (!base.contains(id)) add(id, d.train_rows, d.train_labels);
  for (const auto& id : split.val) add(id, d.val_rows, d.val_labels);
  return d;
}

Forward forward(num::Binder& enc, num::Binder& p, const encoder::EncoderConfig& enc_cfg,
                const PromptConfig& cfg, const TuneData& data, num::AttentionLog* log,
                const Matrix* z_cache) {
  auto& tape = p.tape();
  Var z;
  if (z_cache != nullptr) {
    if (cfg.node_prompt) throw num::NumError("forward: cached Z requires the node prompt off");
    z = tape.constant(*z_cache);
  } else {
    encoder::TypeVars raw;
    raw[0] = tape.constant(data.features[0]);
    if (cfg.node_prompt) raw[0] = apply_user_prompt(p, cfg, raw[0], log);
    z = encoder::encode_target(enc, enc_cfg, data.ctx, raw, encoder::Mode{false, 0, 0, log});
  }

  Forward f;
  Var s;
  if (cfg.structure_prompt) s = structure_prompt(p, cfg, data.ctx, z, log);
  if (!s.valid()) f.z_prime = project(p, cfg, z);
  else if (cfg.mix_after_projection)
    f.z_prime = num::add(project(p, cfg, z), num::scale(project(p, cfg, s), cfg.delta));
  else
    f.z_prime = project(p, cfg, num::add(z, num::scale(s, cfg.delta)));

  if (cfg.head == Head::kPrototype) {
    f.c_proj = project(p, cfg, p("prompt.C"));
    f.logits = num::scale(num::cosine_similarity(f.z_prime, f.c_proj), 1.0 / cfg.tau);
  } else {
    f.logits = num::add_bias(num::matmul(f.z_prime, p("prompt.head.W")), p("prompt.head.b"));
  }
  return f;
}

num::ParamStore initial_prompt_state(const num::ParamStore& encoder,
                                     const encoder::EncoderConfig& enc_cfg, const TuneData& data,
                                     const PromptConfig& cfg) {
  num::ParamStore store;
  PromptShapes shapes;
  for (std::size_t k = 0; k < kNumNodeTypes; ++k) shapes.feature_dims[k] = data.features[k].cols();
  shapes.embed_dim = enc_cfg.hidden_dim;
  init_prompt_params(store, cfg, shapes, cfg.seed);
  if (cfg.head == Head::kPrototype) {
    num::Tape tape;
    num::Binder enc(tape, const_cast<num::ParamStore&>(encoder), false);
    num::Binder p(tape, store, false);
    encoder::TypeVars raw;
    raw[0] = tape.constant(data.features[0]);
    if (cfg.node_prompt) raw[0] = apply_user_prompt(p, cfg, raw[0]);
    const Var z = encoder::encode_target(enc, enc_cfg, data.ctx, raw, encoder::Mode{});
    store.at("prompt.C").value = init_prototypes(z.value(), data.train_rows, data.train_labels);
  }
  return store;
}

TuneResult run_prompt_tune(const num::ParamStore& encoder, const encoder::EncoderConfig& enc_cfg,
                           const TuneData& data, const PromptConfig& cfg,
                           const std::function<void(const EpochRecord&)>& on_epoch) {
  cfg.validate();
  if (data.train_rows.empty()) throw num::NumError("run_prompt_tune: no labeled training nodes");
  TuneResult out;
  num::ParamStore state = initial_prompt_state(encoder, enc_cfg, data, cfg);
  const auto params = trainable(state, cfg);
  const auto targets = target_rows(data.train_labels);
  num::OptimizerState opt;
  opt.config.lr = cfg.lr;
  opt.config.weight_decay = cfg.weight_decay;
  auto& frozen = const_cast<num::ParamStore&>(encoder);
  std::optional<Matrix> z_cache;
  if (!cfg.node_prompt) {
    num::Tape tape;
    num::Binder enc(tape, frozen, false);
    encoder::TypeVars raw;
    raw[0] = tape.constant(data.features[0]);
    z_cache = encoder::encode_target(enc, enc_cfg, data.ctx, raw, encoder::Mode{}).value();
  }

  double best = -1.0;
  for (int epoch = 0; epoch <= cfg.epochs; ++epoch) {
    num::Tape tape;
    num::Binder enc(tape, frozen, false);
    num::Binder p(tape, state, true);
    Forward f = forward(enc, p, enc_cfg, cfg, data, nullptr, z_cache ? &*z_cache : nullptr);
    const Var z_train = num::gather_rows(f.z_prime, data.train_rows);
    Var loss;
    if (cfg.head == Head::kPrototype) {
      loss = tuning_loss(z_train, f.c_proj, targets, cfg.tau, cfg.lambda, p("prompt.C"));
    } else {
      loss = num::cross_entropy(num::gather_rows(f.logits, data.train_rows), targets);
    }
    EpochRecord rec{epoch, loss.scalar(), val_macro_f1(f.logits.value(), data)};
    if (!std::isfinite(rec.loss))
      throw num::NumError("prompt tuning diverged at epoch " + std::to_string(epoch));
    out.trace.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (rec.val_macro_f1 > best) {
      best = rec.val_macro_f1;
      out.best_epoch = epoch;
      out.params = state.clone();
      out.best_logits = f.logits.value();
    }
    if (epoch == cfg.epochs) break;
    state.zero_grad();
    tape.backward(loss);
    num::adam_step(params, opt);
  }
  return out;
}

std::vector<Label> decide_all(const Matrix& logits) {
  std::vector<Label> out(static_cast<std::size_t>(logits.rows()));
  for (Eigen::Index i = 0; i < logits.rows(); ++i)
    out[static_cast<std::size_t>(i)] = decide(logits(i, kParticipantRow), logits(i, kBenignRow));
  return out;
}

std::vector<Label> predict_all(const num::ParamStore& encoder, const encoder::EncoderConfig& enc_cfg,
                               const num::ParamStore& prompt_params, const PromptConfig& cfg,
                               const TuneData& data) {
  num::Tape tape;
  num::Binder enc(tape, const_cast<num::ParamStore&>(encoder), false);
  num::Binder p(tape, const_cast<num::ParamStore&>(prompt_params), false);
  return decide_all(forward(enc, p, enc_cfg, cfg, data).logits.value());
}

}  // namespace hetgdt::prompt
