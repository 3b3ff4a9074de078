// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hetgdt/encoder.hpp"
#include "hetgdt/hetgraph.hpp"
#include "hetgdt/metrics.hpp"
#include "hetgdt/num/binder.hpp"
#include "hetgdt/num/ops.hpp"

namespace hetgdt::prompt {

using num::Matrix;
using num::Var;

/// Row of the prototype matrix C = [p, n] holding each class.
inline constexpr Eigen::Index kParticipantRow = 0;
inline constexpr Eigen::Index kBenignRow = 1;
int prototype_row(Label l);
Label label_of_row(Eigen::Index row);

enum class Head {
  kPrototype,  // cosine similarity to trainable class prototypes
  kLinear,     // affine map to two logits
};

struct PromptConfig {
  Eigen::Index tokens = 10;  // K
  int heads = 4;
  double tau = 0.5;
  double delta = 5e-2;
  double lambda = 1e-3;
  int epochs = 500;
  double lr = 1e-3;
  double weight_decay = 1e-4;
  std::uint64_t seed = 0;

  bool node_prompt = true;       // false: X^ = X
  bool structure_prompt = true;  // false: Z' = g(Z)
  bool projection = true;        // false: g is the identity
  Head head = Head::kPrototype;
  /// true: Z' = g(Z) + delta g(S); false: Z' = g(Z + delta S).
  bool mix_after_projection = true;

  void validate() const;
};

// Parameter layout under the "prompt." prefix.
struct PromptShapes {
  std::array<Eigen::Index, kNumNodeTypes> feature_dims{384, 384, 384};
  Eigen::Index embed_dim = 256;
};

void init_prompt_params(num::ParamStore& store, const PromptConfig& cfg, const PromptShapes& shapes,
                        std::uint64_t seed);
void init_pma_params(num::ParamStore& store, const std::string& prefix, Eigen::Index dim,
                     std::uint64_t seed);

/// Row-wise Att(X, F): softmax_k(tanh(f_k . x_i)) weighted sum of the tokens.
Var attention_combine(Var x, Var tokens, num::AttentionLog* log = nullptr);

/// Pooling by multi-head attention over index segments of `elements`: one
/// output row per segment, zero for empty segments.
Var pma_pool(num::Binder& params, const std::string& prefix, int heads, Var elements,
             std::shared_ptr<const Csr> segments, num::AttentionLog* log = nullptr);

/// X^ for users: X + PMA({Att(X, F^participant), Att(X, F^benign)});
/// other types: X + Att(X, F^type).
encoder::TypeVars apply_node_prompt(num::Binder& params, const PromptConfig& cfg,
                                    const encoder::TypeVars& raw, num::AttentionLog* log = nullptr);
/// Users only; the remaining types are passed through unchanged.
Var apply_user_prompt(num::Binder& params, const PromptConfig& cfg, Var users,
                      num::AttentionLog* log = nullptr);

/// S: PMA over each meta-path neighbourhood of Z, fused by semantic attention.
Var structure_prompt(num::Binder& params, const PromptConfig& cfg, const encoder::GraphContext& ctx,
                     Var z, num::AttentionLog* log = nullptr);

/// Class means of the rows of `z` listed in `rows`, stacked as [p; n].
Matrix init_prototypes(const Matrix& z, const std::vector<std::size_t>& rows,
                       const std::vector<Label>& labels);

/// ||C C^T - I||_F^2
Var orthogonality_loss(Var c);

/// Mean -log softmax_k(cos(z'_i, c_k) / tau) at the true row, plus
/// lambda * orthogonality_loss(c_orth).
Var tuning_loss(Var z_prime, Var c, const std::vector<int>& target_rows, double tau, double lambda,
                Var c_orth);
inline Var tuning_loss(Var z_prime, Var c, const std::vector<int>& target_rows, double tau,
                       double lambda) {
  return tuning_loss(z_prime, c, target_rows, tau, lambda, c);
}

/// Argmax cosine similarity to the rows of C; exact ties go to participant.
Label predict(const Eigen::RowVectorXd& z, const Matrix& c);

/// Frozen-encoder inputs for tuning on one graph.
struct TuneData {
  const HeteroGraph* graph = nullptr;
  encoder::TypeFeatures features;
  encoder::GraphContext ctx;
  std::vector<std::size_t> train_rows;  // user indices with labels (train split + synthetic)
  std::vector<Label> train_labels;
  std::vector<std::size_t> val_rows;
  std::vector<Label> val_labels;
};

/// Builds TuneData from a graph, its features and a split (ids of base users;
/// every labeled synthetic user joins the training set).
TuneData make_tune_data(const HeteroGraph& g, encoder::TypeFeatures features,
                        const SplitAssignment& split);

struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;
  double val_macro_f1 = 0.0;
};

struct TuneResult {
  num::ParamStore params;  // best-validation prompt state
  std::vector<EpochRecord> trace;
  int best_epoch = 0;
  /// Logits of every user under the best-validation state.
  Matrix best_logits;
};

/// Forward pass of the prompted model. Returns Z' (all users) and the
/// comparison targets (g(C) or nothing for a linear head).
struct Forward {
  Var z_prime;
  Var logits;  // N x 2, column 0 = participant
  Var c_proj;
};

/// `z_cache`, when given, replaces the encoder pass; it is only valid with the
/// node prompt off, where Z does not depend on any trainable tensor.
Forward forward(num::Binder& encoder_params, num::Binder& prompt_params,
                const encoder::EncoderConfig& enc_cfg, const PromptConfig& cfg, const TuneData& data,
                num::AttentionLog* log = nullptr, const Matrix* z_cache = nullptr);

/// Logits (N x 2) to labels; ties go to the participant class.
std::vector<Label> decide_all(const Matrix& logits);

/// Trains prompt parameters on `data` with the encoder frozen. `encoder` is
/// never modified.
TuneResult run_prompt_tune(const num::ParamStore& encoder, const encoder::EncoderConfig& enc_cfg,
                           const TuneData& data, const PromptConfig& cfg,
                           const std::function<void(const EpochRecord&)>& on_epoch = {});

/// Initial prompt parameters for `data` (prototypes from class means).
num::ParamStore initial_prompt_state(const num::ParamStore& encoder,
                                     const encoder::EncoderConfig& enc_cfg, const TuneData& data,
                                     const PromptConfig& cfg);

/// Predicted labels for every user of data.graph (index order).
std::vector<Label> predict_all(const num::ParamStore& encoder, const encoder::EncoderConfig& enc_cfg,
                               const num::ParamStore& prompt_params, const PromptConfig& cfg,
                               const TuneData& data);

}  // namespace hetgdt::prompt
