// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "hetgdt/num/adam.hpp"
#include "hetgdt/num/checkpoint.hpp"
#include "hetgdt/num/init.hpp"
#include "hetgdt/num/ops.hpp"
#include "hetgdt/num/rng.hpp"
#include "../support/oracles.hpp"

namespace hetgdt::num {
namespace {

Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

TEST(Ops, SoftmaxNormalizeCosine) {
  Tape t;
  EXPECT_TRUE(softmax_rows(t.constant(mat({{0, 0}}))).value().isApprox(mat({{0.5, 0.5}})));
  EXPECT_TRUE(row_normalize(t.constant(mat({{3, 4}}))).value().isApprox(mat({{0.6, 0.8}})));
  EXPECT_DOUBLE_EQ(cosine_similarity(t.constant(mat({{1, 0}})), t.constant(mat({{0, 1}}))).scalar(), 0.0);
  EXPECT_THROW(row_normalize(t.constant(mat({{0, 0}}))), NumError);
}

TEST(Ops, OpSetIsClosed) {
  EXPECT_NO_THROW(require_op("softmax_rows"));
  EXPECT_NO_THROW(require_op("segment_attention"));
  EXPECT_THROW(require_op("conv2d"), NumError);
  EXPECT_FALSE(op_set().empty());
}

TEST(Ops, SparseMatchesDense) {
  std::mt19937_64 rng(3);
  Matrix d = random_matrix(6, 5, rng);
  for (Eigen::Index i = 0; i < d.size(); ++i)
    if (std::abs(d.data()[i]) < 0.8) d.data()[i] = 0.0;
  auto s = std::make_shared<SparseMatrix>(d.sparseView());
  Matrix b = random_matrix(5, 3, rng);
  Tape t;
  Matrix sp = spmm(s, t.constant(b)).value();
  Matrix dn = matmul(t.constant(d), t.constant(b)).value();
  EXPECT_LE((sp - dn).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Ops, DropoutEvalIsIdentityAndKeyed) {
  std::mt19937_64 rng(1);
  Matrix x = random_matrix(4, 6, rng);
  Tape t;
  auto a = t.constant(x);
  EXPECT_EQ(dropout(a, 0.5, {1, 2, 3}, false).value(), x);
  Matrix m1 = dropout(a, 0.5, {1, 2, 3}, true).value();
  Matrix m2 = dropout(a, 0.5, {1, 2, 3}, true).value();
  Matrix m3 = dropout(a, 0.5, {1, 3, 3}, true).value();
  EXPECT_EQ(m1, m2);
  EXPECT_NE(m1, m3);
}

TEST(Backward, LinearAndQuadratic) {
  ParamStore ps;
  auto& w = ps.add("w", mat({{1, 2}, {3, 4}}));
  auto& v = ps.add("v", mat({{1, 2}}));
  Tape t;
  Matrix x = mat({{5}, {7}});
  t.backward(sum_all(matmul(t.leaf(w), t.constant(x))));
  EXPECT_TRUE(w.grad.isApprox(mat({{5, 7}, {5, 7}})));
  Tape t2;
  t2.backward(frobenius_sq(t2.leaf(v)));
  EXPECT_TRUE(v.grad.isApprox(mat({{2, 4}})));
  Tape t3;
  t3.backward(frobenius_sq(t3.leaf(v)));
  EXPECT_TRUE(v.grad.isApprox(mat({{4, 8}})));  // accumulates
}

TEST(Backward, RejectsNonScalar) {
  ParamStore ps;
  auto& v = ps.add("v", mat({{1, 2}}));
  Tape t;
  EXPECT_THROW(t.backward(t.leaf(v)), NumError);
}

// Each case builds a scalar loss from the store; gradients are checked by FD.
using LossFn = std::function<Var(Tape&, ParamStore&)>;

void expect_fd(const char* name, ParamStore& ps, const LossFn& f) {
  ps.zero_grad();
  {
    Tape t;
    t.backward(f(t, ps));
  }
  auto loss = [&] {
    Tape t;
    return f(t, ps).scalar();
  };
  EXPECT_LT(hetgdt::testing::max_fd_rel_error(ps.all(), loss), 1e-4) << name;
}

TEST(Backward, FiniteDifferencePerOp) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::mt19937_64 rng(seed);
    ParamStore ps;
    ps.add("a", random_matrix(4, 6, rng));
    ps.add("b", random_matrix(6, 4, rng));
    ps.add("c", random_matrix(4, 6, rng));
    ps.add("row", random_matrix(1, 6, rng));
    ps.add("s", random_matrix(1, 1, rng));
    ps.add("gain", random_matrix(1, 6, rng));
    ps.add("w", random_matrix(6, 6, rng));
    auto P = [](Tape& t, ParamStore& p, const char* n) { return t.leaf(p.at(n)); };
    std::vector<std::pair<const char*, LossFn>> cases = {
        {"matmul", [&](Tape& t, ParamStore& p) { return sum_all(tanh(matmul(P(t, p, "a"), P(t, p, "b")))); }},
        {"matmul_nt", [&](Tape& t, ParamStore& p) { return frobenius_sq(matmul_nt(P(t, p, "a"), P(t, p, "c"))); }},
        {"add_sub", [&](Tape& t, ParamStore& p) { return frobenius_sq(sub(add(P(t, p, "a"), P(t, p, "c")), scale(P(t, p, "a"), 0.3))); }},
        {"bias_row", [&](Tape& t, ParamStore& p) { return sum_all(tanh(mul_row(add_bias(P(t, p, "a"), P(t, p, "row")), P(t, p, "gain")))); }},
        {"mul_scalar", [&](Tape& t, ParamStore& p) { return frobenius_sq(mul_scalar(P(t, p, "a"), P(t, p, "s"))); }},
        {"hadamard_elu", [&](Tape& t, ParamStore& p) { return sum_all(elu(hadamard(P(t, p, "a"), P(t, p, "c")))); }},
        {"exp_log", [&](Tape& t, ParamStore& p) { return sum_all(log(add_bias(exp(P(t, p, "a")), t.constant(Matrix::Constant(1, 6, 0.5))))); }},
        {"softmax", [&](Tape& t, ParamStore& p) { return sum_all(hadamard(softmax_rows(P(t, p, "a")), P(t, p, "c"))); }},
        {"log_softmax", [&](Tape& t, ParamStore& p) { return sum_all(hadamard(log_softmax_rows(P(t, p, "a")), P(t, p, "c"))); }},
        {"cosine", [&](Tape& t, ParamStore& p) { return sum_all(tanh(cosine_similarity(P(t, p, "a"), P(t, p, "c")))); }},
        {"layer_norm", [&](Tape& t, ParamStore& p) { return sum_all(hadamard(layer_norm_rows(P(t, p, "a"), P(t, p, "gain"), P(t, p, "row")), P(t, p, "c"))); }},
        {"concat", [&](Tape& t, ParamStore& p) { return frobenius_sq(tanh(concat_rows({concat_cols({P(t, p, "a"), P(t, p, "c")}), concat_cols({P(t, p, "c"), P(t, p, "a")})}))); }},
        {"gather_mask", [&](Tape& t, ParamStore& p) { return frobenius_sq(mask_rows(gather_rows(P(t, p, "a"), {3, 1, 1, 0}), {1.0, 0.0, 2.0, -1.0})); }},
        {"pick_mean", [&](Tape& t, ParamStore& p) { return add(sum_all(mul_scalar(mean_rows(tanh(P(t, p, "a"))), pick(P(t, p, "c"), 2, 3))), mean_all(tanh(P(t, p, "c")))); }},
        {"cross_entropy", [&](Tape& t, ParamStore& p) { return cross_entropy(matmul(P(t, p, "a"), P(t, p, "w")), {0, 5, 2, 2}); }},
    };
    for (const auto& [name, f] : cases) {
      expect_fd(name, ps, f);
    }
  }
}

TEST(SegmentAttention, WeightsAndGradients) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::mt19937_64 rng(seed + 11);
    auto seg = std::make_shared<Csr>(Csr::from_rows({{0, 2, 3}, {}, {1}, {4, 0, 1, 2}}));
    ParamStore ps;
    ps.add("owner", random_matrix(4, 2, rng));
    ps.add("elem", random_matrix(5, 2, rng));
    ps.add("vals", random_matrix(5, 6, rng));
    ps.add("mix", random_matrix(4, 6, rng));
    for (auto act : {ScoreActivation::kNone, ScoreActivation::kTanh}) {
      AttentionLog log;
      {
        Tape t;
        auto out = segment_attention(seg, t.leaf(ps.at("owner")), t.leaf(ps.at("elem")),
                                     t.leaf(ps.at("vals")), act, &log);
        EXPECT_TRUE(out.value().row(1).isZero());
      }
      EXPECT_EQ(log.distributions.size(), 6u);  // 3 non-empty segments x 2 heads
      for (const auto& d : log.distributions) {
        double s = 0;
        for (double w : d) s += w;
        EXPECT_NEAR(s, 1.0, 1e-12);
      }
      expect_fd("segment_attention", ps, [&](Tape& t, ParamStore& p) {
        return sum_all(hadamard(segment_attention(seg, t.leaf(p.at("owner")), t.leaf(p.at("elem")),
                                                  t.leaf(p.at("vals")), act),
                                t.leaf(p.at("mix"))));
      });
    }
  }
}

TEST(Adam, HandEvaluatedFirstStep) {
  ParamStore ps;
  auto& p = ps.add("p", mat({{0.0}}));
  p.grad(0, 0) = 1.0;
  OptimizerState st;
  st.config.lr = 1e-3;
  adam_step(ps.all(), st);
  EXPECT_NEAR(p.value(0, 0), -1e-3, 1e-9);
  EXPECT_EQ(st.step, 1u);
  adam_step(ps.all(), st);
  EXPECT_EQ(st.step, 2u);
}

TEST(Adam, ZeroGradientOnlyDecays) {
  ParamStore ps;
  auto& p = ps.add("p", mat({{2.0, -1.0}}));
  OptimizerState st;
  adam_step(ps.all(), st);
  EXPECT_EQ(p.value, mat({{2.0, -1.0}}));
  st.config.weight_decay = 0.1;
  adam_step(ps.all(), st);
  EXPECT_LT(p.value(0, 0), 2.0);
  EXPECT_GT(p.value(0, 1), -1.0);
}

TEST(Adam, RejectsShapeMismatch) {
  ParamStore ps;
  auto& p = ps.add("p", mat({{1.0}}));
  OptimizerState st;
  adam_step(ps.all(), st);
  p.grad = Matrix::Zero(2, 2);
  EXPECT_THROW(adam_step(ps.all(), st), NumError);
}

TEST(Init, SchemesAndDeterminism) {
  EXPECT_TRUE(init_params(2, 2, InitScheme::kZeros, 1).isZero());
  EXPECT_EQ(init_params(3, 4, InitScheme::kXavierUniform, 9),
            init_params(3, 4, InitScheme::kXavierUniform, 9));
  EXPECT_THROW(init_params(0, 4, InitScheme::kZeros, 1), NumError);
  const double bound = std::sqrt(6.0 / 200.0);
  double total = 0.0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    Matrix m = init_params(100, 100, InitScheme::kXavierUniform, s);
    EXPECT_LE(m.cwiseAbs().maxCoeff(), bound);
    total += m.mean();
  }
  EXPECT_NEAR(total / 10.0, 0.0, 0.01);
}

TEST(Checkpoint, RoundTripAndHashCheck) {
  ParamStore ps;
  std::mt19937_64 rng(5);
  ps.add("enc.w", random_matrix(3, 4, rng));
  ps.add("enc.b", random_matrix(1, 4, rng));
  auto dir = std::filesystem::temp_directory_path() / "hetgdt_ckpt_test";
  std::filesystem::create_directories(dir);
  save_checkpoint(dir / "model", ps, "abc", {{"note", 1}});
  auto ck = load_checkpoint(dir / "model");
  EXPECT_EQ(ck.config_hash, "abc");
  EXPECT_EQ(ck.params.at("enc.w").value, ps.at("enc.w").value);
  EXPECT_EQ(ck.extra["note"], 1);
  auto copy = ps.clone();
  copy.at("enc.w").value.setZero();
  load_into(dir / "model", copy, "abc");
  EXPECT_EQ(copy.at("enc.w").value, ps.at("enc.w").value);
  EXPECT_THROW(load_into(dir / "model", copy, "other"), NumError);
  std::filesystem::remove_all(dir);
}

TEST(Rng, DeriveSeedDependsOnLabel) {
  EXPECT_NE(derive_seed(1, "pretrain"), derive_seed(1, "tune"));
  EXPECT_EQ(derive_seed(1, "pretrain"), derive_seed(1, "pretrain"));
  EXPECT_NE(derive_seed(1, "pretrain"), derive_seed(2, "pretrain"));
}

}  // namespace
}  // namespace hetgdt::num
