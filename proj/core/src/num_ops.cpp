// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetgdt/num/ops.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "hetgdt/num/rng.hpp"

namespace hetgdt::num {

namespace {

constexpr std::array<std::string_view, 32> kOps = {
    "matmul",        "matmul_nt",       "spmm",          "add",
    "sub",           "add_bias",        "mul_row",       "scale",
    "mul_scalar",    "hadamard",        "tanh",          "elu",
    "exp",           "log",             "softmax_rows",  "log_softmax_rows",
    "row_normalize", "cosine_similarity", "layer_norm_rows", "concat_cols",
    "concat_rows",   "gather_rows",     "mask_rows",     "pick",
    "mean_rows",     "sum_all",         "mean_all",      "frobenius_sq",
    "cross_entropy", "dropout",         "segment_attention", "leaf"};

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void check_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw NumError(std::string(op) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                   std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                   std::to_string(b.cols()));
}

void check_row_vector(const Matrix& a, const Matrix& row, const char* op) {
  if (row.rows() != 1 || row.cols() != a.cols())
    throw NumError(std::string(op) + ": expected a 1x" + std::to_string(a.cols()) + " row");
}

Tape& tape_of(Var a) { return a.tape(); }

}  // namespace

std::span<const std::string_view> op_set() { return kOps; }

void require_op(std::string_view name) {
  if (std::find(kOps.begin(), kOps.end(), name) == kOps.end())
    throw NumError("unsupported op '" + std::string(name) + "'");
}

Var matmul(Var a, Var b) {
  if (a.cols() != b.rows())
    throw NumError("matmul: inner dimensions " + std::to_string(a.cols()) + " and " +
                   std::to_string(b.rows()) + " differ");
  Matrix v;
  v.noalias() = a.value() * b.value();
  const auto ia = a.id(), ib = b.id();
  return tape_of(a).record(std::move(v), {a, b}, [ia, ib](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    if (t.needs_grad(ia)) t.grad(ia).noalias() += g * t.value(ib).transpose();
    if (t.needs_grad(ib)) t.grad(ib).noalias() += t.value(ia).transpose() * g;
  });
}

Var matmul_nt(Var a, Var b) {
  if (a.cols() != b.cols()) throw NumError("matmul_nt: column counts differ");
  Matrix v;
  v.noalias() = a.value() * b.value().transpose();
  const auto ia = a.id(), ib = b.id();
  return tape_of(a).record(std::move(v), {a, b}, [ia, ib](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    if (t.needs_grad(ia)) t.grad(ia).noalias() += g * t.value(ib);
    if (t.needs_grad(ib)) t.grad(ib).noalias() += g.transpose() * t.value(ia);
  });
}

namespace {

// CSR kernels over row-major copies so every update touches contiguous rows.
Matrix csr_times(const SparseMatrix& s, const Matrix& b) {
  const RowMajor br = b;
  RowMajor out = RowMajor::Zero(s.rows(), b.cols());
  for (Eigen::Index i = 0; i < s.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(s, i); it; ++it) out.row(i) += it.value() * br.row(it.col());
  return out;
}

Matrix csr_transpose_times(const SparseMatrix& s, const Matrix& g) {
  const RowMajor gr = g;
  RowMajor out = RowMajor::Zero(s.cols(), g.cols());
  for (Eigen::Index i = 0; i < s.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(s, i); it; ++it) out.row(it.col()) += it.value() * gr.row(i);
  return out;
}

}  // namespace

Var spmm(std::shared_ptr<const SparseMatrix> s, Var b) {
  if (s->cols() != b.rows()) throw NumError("spmm: inner dimensions differ");
  Matrix v = csr_times(*s, b.value());
  const auto ib = b.id();
  return tape_of(b).record(std::move(v), {b}, [s, ib](Tape& t, std::size_t self) {
    t.grad(ib) += csr_transpose_times(*s, t.grad(self));
  });
}

Var add(Var a, Var b) {
  check_same_shape(a.value(), b.value(), "add");
  const auto ia = a.id(), ib = b.id();
  return tape_of(a).record(a.value() + b.value(), {a, b}, [ia, ib](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    if (t.needs_grad(ia)) t.grad(ia) += g;
    if (t.needs_grad(ib)) t.grad(ib) += g;
  });
}

Var sub(Var a, Var b) {
  check_same_shape(a.value(), b.value(), "sub");
  const auto ia = a.id(), ib = b.id();
  return tape_of(a).record(a.value() - b.value(), {a, b}, [ia, ib](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    if (t.needs_grad(ia)) t.grad(ia) += g;
    if (t.needs_grad(ib)) t.grad(ib) -= g;
  });
}

Var add_bias(Var a, Var bias) {
  check_row_vector(a.value(), bias.value(), "add_bias");
  Matrix v = a.value().rowwise() + bias.value().row(0);
  const auto ia = a.id(), ib = bias.id();
  return tape_of(a).record(std::move(v), {a, bias}, [ia, ib](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    if (t.needs_grad(ia)) t.grad(ia) += g;
    if (t.needs_grad(ib)) t.grad(ib) += g.colwise().sum();
  });
}

Var mul_row(Var a, Var row) {
  check_row_vector(a.value(), row.value(), "mul_row");
  Matrix v = a.value().array().rowwise() * row.value().row(0).array();
  const auto ia = a.id(), ir = row.id();
  return tape_of(a).record(std::move(v), {a, row}, [ia, ir](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    if (t.needs_grad(ia))
      t.grad(ia).array() += g.array().rowwise() * t.value(ir).row(0).array();
    if (t.needs_grad(ir)) t.grad(ir) += g.cwiseProduct(t.value(ia)).colwise().sum();
  });
}

Var scale(Var a, double c) {
  const auto ia = a.id();
  return tape_of(a).record(a.value() * c, {a}, [ia, c](Tape& t, std::size_t self) {
    t.grad(ia) += c * t.grad(self);
  });
}

Var mul_scalar(Var a, Var s) {
  if (s.rows() != 1 || s.cols() != 1) throw NumError("mul_scalar: scale must be 1x1");
  const auto ia = a.id(), is = s.id();
  return tape_of(a).record(a.value() * s.value()(0, 0), {a, s},
                           [ia, is](Tape& t, std::size_t self) {
                             const Matrix& g = t.grad(self);
                             if (t.needs_grad(ia)) t.grad(ia) += t.value(is)(0, 0) * g;
                             if (t.needs_grad(is)) t.grad(is)(0, 0) += g.cwiseProduct(t.value(ia)).sum();
                           });
}

Var hadamard(Var a, Var b) {
  check_same_shape(a.value(), b.value(), "hadamard");
  const auto ia = a.id(), ib = b.id();
  return tape_of(a).record(a.value().cwiseProduct(b.value()), {a, b},
                           [ia, ib](Tape& t, std::size_t self) {
                             const Matrix& g = t.grad(self);
                             if (t.needs_grad(ia)) t.grad(ia) += g.cwiseProduct(t.value(ib));
                             if (t.needs_grad(ib)) t.grad(ib) += g.cwiseProduct(t.value(ia));
                           });
}

Var tanh(Var a) {
  const auto ia = a.id();
  return tape_of(a).record(a.value().array().tanh().matrix(), {a},
                           [ia](Tape& t, std::size_t self) {
                             const auto& y = t.value(self).array();
                             t.grad(ia).array() += t.grad(self).array() * (1.0 - y.square());
                           });
}

Var elu(Var a, double alpha) {
  const Matrix& x = a.value();
  Matrix v = x.unaryExpr([alpha](double z) { return z > 0 ? z : alpha * std::expm1(z); });
  const auto ia = a.id();
  return tape_of(a).record(std::move(v), {a}, [ia, alpha](Tape& t, std::size_t self) {
    const Matrix& x = t.value(ia);
    const Matrix& y = t.value(self);
    Matrix& ga = t.grad(ia);
    const Matrix& g = t.grad(self);
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      for (Eigen::Index i = 0; i < x.rows(); ++i)
        ga(i, j) += g(i, j) * (x(i, j) > 0 ? 1.0 : y(i, j) + alpha);
  });
}

Var exp(Var a) {
  const auto ia = a.id();
  return tape_of(a).record(a.value().array().exp().matrix(), {a},
                           [ia](Tape& t, std::size_t self) {
                             t.grad(ia) += t.grad(self).cwiseProduct(t.value(self));
                           });
}

Var log(Var a) {
  if ((a.value().array() <= 0.0).any()) throw NumError("log: non-positive input");
  const auto ia = a.id();
  return tape_of(a).record(a.value().array().log().matrix(), {a},
                           [ia](Tape& t, std::size_t self) {
                             t.grad(ia).array() += t.grad(self).array() / t.value(ia).array();
                           });
}

namespace {

Matrix softmax_of(const Matrix& x) {
  Matrix y = x.colwise() - x.rowwise().maxCoeff();
  y = y.array().exp().matrix();
  y.array().colwise() /= y.rowwise().sum().array();
  return y;
}

}  // namespace

Var softmax_rows(Var a) {
  const auto ia = a.id();
  return tape_of(a).record(softmax_of(a.value()), {a}, [ia](Tape& t, std::size_t self) {
    const Matrix& y = t.value(self);
    const Matrix& g = t.grad(self);
    Eigen::VectorXd dot = g.cwiseProduct(y).rowwise().sum();
    t.grad(ia).array() += y.array() * (g.colwise() - dot).array();
  });
}

Var log_softmax_rows(Var a) {
  const Matrix& x = a.value();
  Eigen::VectorXd mx = x.rowwise().maxCoeff();
  Matrix shifted = x.colwise() - mx;
  Eigen::VectorXd lse = shifted.array().exp().rowwise().sum().log().matrix() + mx;
  Matrix v = x.colwise() - lse;
  const auto ia = a.id();
  return tape_of(a).record(std::move(v), {a}, [ia](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    Matrix p = t.value(self).array().exp().matrix();
    Eigen::VectorXd gs = g.rowwise().sum();
    t.grad(ia) += g - (p.array().colwise() * gs.array()).matrix();
  });
}

Var row_normalize(Var a) {
  Eigen::VectorXd norms = a.value().rowwise().norm();
  if ((norms.array() == 0.0).any()) throw NumError("row_normalize: zero-norm row");
  Matrix v = a.value().array().colwise() / norms.array();
  const auto ia = a.id();
  return tape_of(a).record(std::move(v), {a}, [ia, norms](Tape& t, std::size_t self) {
    const Matrix& y = t.value(self);
    const Matrix& g = t.grad(self);
    Eigen::VectorXd dot = g.cwiseProduct(y).rowwise().sum();
    Matrix dx = g - (y.array().colwise() * dot.array()).matrix();
    t.grad(ia).array() += dx.array().colwise() / norms.array();
  });
}

Var cosine_similarity(Var a, Var b) { return matmul_nt(row_normalize(a), row_normalize(b)); }

Var layer_norm_rows(Var a, Var gain, Var bias, double eps) {
  check_row_vector(a.value(), gain.value(), "layer_norm_rows");
  check_row_vector(a.value(), bias.value(), "layer_norm_rows");
  const Matrix& x = a.value();
  const double n = static_cast<double>(x.cols());
  Eigen::VectorXd mean = x.rowwise().mean();
  Matrix centered = x.colwise() - mean;
  Eigen::VectorXd inv_std =
      ((centered.array().square().rowwise().sum() / n) + eps).rsqrt().matrix();
  Matrix xhat = centered.array().colwise() * inv_std.array();
  Matrix v = (xhat.array().rowwise() * gain.value().row(0).array()).matrix().rowwise() +
             bias.value().row(0);
  const auto ia = a.id(), ig = gain.id(), ib = bias.id();
  return tape_of(a).record(
      std::move(v), {a, gain, bias},
      [ia, ig, ib, xhat = std::move(xhat), inv_std, n](Tape& t, std::size_t self) {
        const Matrix& g = t.grad(self);
        if (t.needs_grad(ig)) t.grad(ig) += g.cwiseProduct(xhat).colwise().sum();
        if (t.needs_grad(ib)) t.grad(ib) += g.colwise().sum();
        if (t.needs_grad(ia)) {
          Matrix dxhat = g.array().rowwise() * t.value(ig).row(0).array();
          Eigen::VectorXd m1 = dxhat.rowwise().sum() / n;
          Eigen::VectorXd m2 = dxhat.cwiseProduct(xhat).rowwise().sum() / n;
          Matrix dx = (dxhat.colwise() - m1) - (xhat.array().colwise() * m2.array()).matrix();
          t.grad(ia).array() += dx.array().colwise() * inv_std.array();
        }
      });
}

Var concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw NumError("concat_cols: no operands");
  const auto rows = parts.front().rows();
  Eigen::Index cols = 0;
  for (const auto& p : parts) {
    if (p.rows() != rows) throw NumError("concat_cols: row counts differ");
    cols += p.cols();
  }
  Matrix v(rows, cols);
  std::vector<std::pair<std::size_t, Eigen::Index>> spans;
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    v.middleCols(at, p.cols()) = p.value();
    spans.emplace_back(p.id(), at);
    at += p.cols();
  }
  return tape_of(parts.front()).record(std::move(v), parts, [spans](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    for (const auto& [id, off] : spans)
      if (t.needs_grad(id)) t.grad(id) += g.middleCols(off, t.value(id).cols());
  });
}

Var concat_rows(const std::vector<Var>& parts) {
  if (parts.empty()) throw NumError("concat_rows: no operands");
  const auto cols = parts.front().cols();
  Eigen::Index rows = 0;
  for (const auto& p : parts) {
    if (p.cols() != cols) throw NumError("concat_rows: column counts differ");
    rows += p.rows();
  }
  Matrix v(rows, cols);
  std::vector<std::pair<std::size_t, Eigen::Index>> spans;
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    v.middleRows(at, p.rows()) = p.value();
    spans.emplace_back(p.id(), at);
    at += p.rows();
  }
  return tape_of(parts.front()).record(std::move(v), parts, [spans](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    for (const auto& [id, off] : spans)
      if (t.needs_grad(id)) t.grad(id) += g.middleRows(off, t.value(id).rows());
  });
}

Var gather_rows(Var a, std::vector<std::size_t> rows) {
  const Matrix& x = a.value();
  Matrix v(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= static_cast<std::size_t>(x.rows())) throw NumError("gather_rows: index out of range");
    v.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
  }
  const auto ia = a.id();
  return tape_of(a).record(std::move(v), {a}, [ia, rows = std::move(rows)](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    Matrix& ga = t.grad(ia);
    for (std::size_t i = 0; i < rows.size(); ++i)
      ga.row(static_cast<Eigen::Index>(rows[i])) += g.row(static_cast<Eigen::Index>(i));
  });
}

Var mask_rows(Var a, std::vector<double> mask) {
  if (mask.size() != static_cast<std::size_t>(a.rows())) throw NumError("mask_rows: size mismatch");
  Eigen::Map<const Eigen::VectorXd> m(mask.data(), static_cast<Eigen::Index>(mask.size()));
  Matrix v = a.value().array().colwise() * m.array();
  const auto ia = a.id();
  return tape_of(a).record(std::move(v), {a}, [ia, mask = std::move(mask)](Tape& t, std::size_t self) {
    Eigen::Map<const Eigen::VectorXd> m(mask.data(), static_cast<Eigen::Index>(mask.size()));
    t.grad(ia).array() += t.grad(self).array().colwise() * m.array();
  });
}

Var pick(Var a, Eigen::Index r, Eigen::Index c) {
  if (r < 0 || c < 0 || r >= a.rows() || c >= a.cols()) throw NumError("pick: index out of range");
  Matrix v(1, 1);
  v(0, 0) = a.value()(r, c);
  const auto ia = a.id();
  return tape_of(a).record(std::move(v), {a}, [ia, r, c](Tape& t, std::size_t self) {
    t.grad(ia)(r, c) += t.grad(self)(0, 0);
  });
}

Var mean_rows(Var a) {
  if (a.rows() == 0) throw NumError("mean_rows: empty set");
  const auto ia = a.id();
  const double n = static_cast<double>(a.rows());
  return tape_of(a).record(a.value().colwise().mean(), {a}, [ia, n](Tape& t, std::size_t self) {
    t.grad(ia).rowwise() += t.grad(self).row(0) / n;
  });
}

Var sum_all(Var a) {
  Matrix v(1, 1);
  v(0, 0) = a.value().sum();
  const auto ia = a.id();
  return tape_of(a).record(std::move(v), {a}, [ia](Tape& t, std::size_t self) {
    t.grad(ia).array() += t.grad(self)(0, 0);
  });
}

Var mean_all(Var a) {
  if (a.value().size() == 0) throw NumError("mean_all: empty input");
  return scale(sum_all(a), 1.0 / static_cast<double>(a.value().size()));
}

Var frobenius_sq(Var a) {
  Matrix v(1, 1);
  v(0, 0) = a.value().squaredNorm();
  const auto ia = a.id();
  return tape_of(a).record(std::move(v), {a}, [ia](Tape& t, std::size_t self) {
    t.grad(ia) += (2.0 * t.grad(self)(0, 0)) * t.value(ia);
  });
}

Var cross_entropy(Var logits, std::vector<int> targets) {
  const Matrix& x = logits.value();
  if (targets.size() != static_cast<std::size_t>(x.rows()) || targets.empty())
    throw NumError("cross_entropy: need one target per row");
  for (int c : targets)
    if (c < 0 || c >= x.cols()) throw NumError("cross_entropy: target out of range");
  Matrix p = softmax_of(x);
  Eigen::VectorXd mx = x.rowwise().maxCoeff();
  Eigen::VectorXd lse = (x.colwise() - mx).array().exp().rowwise().sum().log().matrix() + mx;
  double loss = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    loss += lse(r) - x(r, targets[i]);
  }
  const double n = static_cast<double>(targets.size());
  Matrix v(1, 1);
  v(0, 0) = loss / n;
  const auto ia = logits.id();
  return tape_of(logits).record(
      std::move(v), {logits},
      [ia, p = std::move(p), targets = std::move(targets), n](Tape& t, std::size_t self) {
        const double g = t.grad(self)(0, 0) / n;
        Matrix d = p;
        for (std::size_t i = 0; i < targets.size(); ++i) d(static_cast<Eigen::Index>(i), targets[i]) -= 1.0;
        t.grad(ia) += g * d;
      });
}

Var dropout(Var a, double rate, DropoutKey key, bool train) {
  if (rate < 0.0 || rate >= 1.0) throw NumError("dropout: rate must be in [0, 1)");
  if (!train || rate == 0.0) return a;
  const Matrix& x = a.value();
  Matrix mask(x.rows(), x.cols());
  const std::uint64_t base = mix64(mix64(key.seed) ^ mix64(key.epoch + 0x51ed27) ^
                                   mix64(key.instance * 0x2545f4914f6cdd1dULL));
  const double keep = 1.0 / (1.0 - rate);
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const auto e = static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(x.cols()) +
                     static_cast<std::uint64_t>(j);
      mask(i, j) = to_unit(mix64(base + e)) < rate ? 0.0 : keep;
    }
  Matrix v = x.cwiseProduct(mask);
  const auto ia = a.id();
  return tape_of(a).record(std::move(v), {a}, [ia, mask = std::move(mask)](Tape& t, std::size_t self) {
    t.grad(ia) += t.grad(self).cwiseProduct(mask);
  });
}

Var segment_attention(std::shared_ptr<const Csr> segments, Var owner_scores, Var elem_scores,
                      Var values, ScoreActivation act, AttentionLog* log) {
  const auto n = static_cast<Eigen::Index>(segments->rows());
  const auto m = values.rows();
  const auto h = elem_scores.cols();
  const auto d = values.cols();
  if (h <= 0 || d % h != 0) throw NumError("segment_attention: value width not divisible by heads");
  if (elem_scores.rows() != m) throw NumError("segment_attention: one score row per element");
  const bool has_owner = owner_scores.valid();
  if (has_owner && (owner_scores.rows() != n || owner_scores.cols() != h))
    throw NumError("segment_attention: owner scores must be segments x heads");
  for (std::size_t j : segments->indices)
    if (static_cast<Eigen::Index>(j) >= m) throw NumError("segment_attention: member out of range");

  const Eigen::Index block = d / h;
  const RowMajor vals = values.value();
  const RowMajor es = elem_scores.value();
  RowMajor os;
  if (has_owner) os = owner_scores.value();
  const std::size_t nnz = segments->nnz();
  // Per (member slot, head): activated score, then softmax weight.
  auto act_scores = std::make_shared<std::vector<double>>(nnz * static_cast<std::size_t>(h));
  auto weights = std::make_shared<std::vector<double>>(nnz * static_cast<std::size_t>(h));
  RowMajor out = RowMajor::Zero(n, d);

  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t lo = segments->offsets[static_cast<std::size_t>(i)];
    const std::size_t hi = segments->offsets[static_cast<std::size_t>(i) + 1];
    if (lo == hi) continue;
    for (Eigen::Index k = 0; k < h; ++k) {
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t e = lo; e < hi; ++e) {
        const auto j = static_cast<Eigen::Index>(segments->indices[e]);
        double s = es(j, k) + (has_owner ? os(i, k) : 0.0);
        if (act == ScoreActivation::kTanh) s = std::tanh(s);
        (*act_scores)[e * h + k] = s;
        mx = std::max(mx, s);
      }
      double z = 0.0;
      for (std::size_t e = lo; e < hi; ++e) {
        const double w = std::exp((*act_scores)[e * h + k] - mx);
        (*weights)[e * h + k] = w;
        z += w;
      }
      for (std::size_t e = lo; e < hi; ++e) {
        const double w = ((*weights)[e * h + k] /= z);
        const auto j = static_cast<Eigen::Index>(segments->indices[e]);
        out.row(i).segment(k * block, block) += w * vals.row(j).segment(k * block, block);
      }
      if (log != nullptr) {
        std::vector<double> dist;
        dist.reserve(hi - lo);
        for (std::size_t e = lo; e < hi; ++e) dist.push_back((*weights)[e * h + k]);
        log->distributions.push_back(std::move(dist));
      }
    }
  }

  std::vector<Var> parents = {elem_scores, values};
  if (has_owner) parents.push_back(owner_scores);
  const auto ie = elem_scores.id(), iv = values.id();
  const std::size_t io = has_owner ? owner_scores.id() : 0;
  return tape_of(values).record(
      Matrix(out), parents,
      [segments, act_scores, weights, ie, iv, io, has_owner, h, block, act](Tape& t, std::size_t self) {
        const RowMajor g = t.grad(self);
        const RowMajor vals = t.value(iv);
        const bool want_v = t.needs_grad(iv);
        const bool want_e = t.needs_grad(ie);
        const bool want_o = has_owner && t.needs_grad(io);
        RowMajor dv = RowMajor::Zero(vals.rows(), vals.cols());
        RowMajor de = RowMajor::Zero(t.value(ie).rows(), h);
        RowMajor downer;
        if (want_o) downer = RowMajor::Zero(t.value(io).rows(), h);
        std::vector<double> da;
        for (std::size_t i = 0; i + 1 < segments->offsets.size(); ++i) {
          const std::size_t lo = segments->offsets[i];
          const std::size_t hi = segments->offsets[i + 1];
          if (lo == hi) continue;
          const auto ri = static_cast<Eigen::Index>(i);
          for (Eigen::Index k = 0; k < h; ++k) {
            const auto gblk = g.row(ri).segment(k * block, block);
            da.assign(hi - lo, 0.0);
            double mean_da = 0.0;
            for (std::size_t e = lo; e < hi; ++e) {
              const auto j = static_cast<Eigen::Index>(segments->indices[e]);
              const double w = (*weights)[e * h + k];
              if (want_v) dv.row(j).segment(k * block, block) += w * gblk;
              da[e - lo] = gblk.dot(vals.row(j).segment(k * block, block));
              mean_da += w * da[e - lo];
            }
            if (!want_e && !want_o) continue;
            for (std::size_t e = lo; e < hi; ++e) {
              const double w = (*weights)[e * h + k];
              double ds = w * (da[e - lo] - mean_da);
              if (act == ScoreActivation::kTanh) {
                const double s = (*act_scores)[e * h + k];
                ds *= 1.0 - s * s;
              }
              if (want_e) de(static_cast<Eigen::Index>(segments->indices[e]), k) += ds;
              if (want_o) downer(ri, k) += ds;
            }
          }
        }
        if (want_v) t.grad(iv) += Matrix(dv);
        if (want_e) t.grad(ie) += Matrix(de);
        if (want_o) t.grad(io) += Matrix(downer);
      });
}

}  // namespace hetgdt::num
