// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "hetgdt/csr.hpp"
#include "hetgdt/num/tape.hpp"

namespace hetgdt::num {

/// Names of every differentiable op below. Ops are only reachable through
/// these functions; `require_op` rejects anything else by name.
std::span<const std::string_view> op_set();
void require_op(std::string_view name);

// Linear algebra.
Var matmul(Var a, Var b);
/// a * b^T
Var matmul_nt(Var a, Var b);
/// Constant sparse matrix times dense variable.
Var spmm(std::shared_ptr<const SparseMatrix> s, Var b);

// Elementwise and broadcasting.
Var add(Var a, Var b);
Var sub(Var a, Var b);
/// Adds the 1 x cols row vector `bias` to every row of `a`.
Var add_bias(Var a, Var bias);
/// Multiplies column j of every row of `a` by row(0, j).
Var mul_row(Var a, Var row);
Var scale(Var a, double c);
/// Scales `a` by the 1x1 variable `s`.
Var mul_scalar(Var a, Var s);
Var hadamard(Var a, Var b);
Var tanh(Var a);
Var elu(Var a, double alpha = 1.0);
Var exp(Var a);
Var log(Var a);

// Row-wise reductions and normalizations.
Var softmax_rows(Var a);
Var log_softmax_rows(Var a);
/// Divides each row by its L2 norm; a zero row is an error.
Var row_normalize(Var a);
/// Cosine similarity between every row of `a` and every row of `b`.
Var cosine_similarity(Var a, Var b);
Var layer_norm_rows(Var a, Var gain, Var bias, double eps = 1e-5);

// Shape.
Var concat_cols(const std::vector<Var>& parts);
Var concat_rows(const std::vector<Var>& parts);
Var gather_rows(Var a, std::vector<std::size_t> rows);
/// Multiplies row i by the constant mask[i].
Var mask_rows(Var a, std::vector<double> mask);
/// The (r, c) entry as a 1x1 variable.
Var pick(Var a, Eigen::Index r, Eigen::Index c);

// Scalar reductions.
/// 1 x cols mean over the rows (mean over a set of vectors).
Var mean_rows(Var a);
Var sum_all(Var a);
Var mean_all(Var a);
Var frobenius_sq(Var a);
/// Mean negative log-likelihood of `targets` under row-wise softmax(logits).
Var cross_entropy(Var logits, std::vector<int> targets);

/// Counter-based dropout mask key: the same key always draws the same mask.
struct DropoutKey {
  std::uint64_t seed = 0;
  std::uint64_t epoch = 0;
  std::uint64_t instance = 0;
};
/// Inverted dropout in training mode; identity when `train` is false.
Var dropout(Var a, double rate, DropoutKey key, bool train);

enum class ScoreActivation { kNone, kTanh };

/// Records the normalized weight vectors produced by attention stages.
struct AttentionLog {
  std::vector<std::vector<double>> distributions;
};

/// Multi-head attention pooling over index segments.
///
/// For segment i and head k with members j in segments.row(i):
///   s_ij = act(owner(i, k) + elem(j, k)),  a_ij = softmax_j(s_ij),
///   out(i, block k) = sum_j a_ij * values(j, block k),
/// where block k is the k-th of `heads` equal column blocks of `values`.
/// `owner_scores` may be an invalid Var (treated as zero). Empty segments
/// produce zero rows.
Var segment_attention(std::shared_ptr<const Csr> segments, Var owner_scores, Var elem_scores,
                      Var values, ScoreActivation act, AttentionLog* log = nullptr);

}  // namespace hetgdt::num
