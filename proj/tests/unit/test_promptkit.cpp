// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "graphs.hpp"
#include "hetgdt/augment/embedder.hpp"
#include "hetgdt/num/adam.hpp"
#include "hetgdt/promptkit.hpp"
#include "hetgdt/synthgen.hpp"
#include "nn_oracles.hpp"
#include "oracles.hpp"

namespace hetgdt {
namespace {

using num::Matrix;
using num::Var;
using prompt::PromptConfig;
using testing::random_matrix;
using testing::ref_attention_combine;
using testing::ref_pma;
using testing::ref_semantic;

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

/// Perturbs every parameter so no block sits at a special initial value.
void randomize(num::ParamStore& ps, std::uint64_t seed, double scale = 0.4) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, scale);
  for (auto* p : ps.all())
    for (Eigen::Index i = 0; i < p->value.size(); ++i) p->value.data()[i] += n(rng);
}

std::shared_ptr<const Csr> segments(std::vector<std::vector<std::size_t>> rows) {
  return std::make_shared<const Csr>(Csr::from_rows(rows));
}

TEST(AttentionCombine, SingletonIdenticalAndHandCase) {
  num::Tape tape;
  std::mt19937_64 rng(1);
  const Matrix f1 = random_matrix(1, 4, rng);
  const Matrix x = random_matrix(3, 4, rng);
  EXPECT_TRUE(prompt::attention_combine(tape.constant(x), tape.constant(f1)).value().isApprox(f1.replicate(3, 1), 1e-15));
  const Matrix same = f1.replicate(5, 1);
  EXPECT_TRUE(prompt::attention_combine(tape.constant(x), tape.constant(same)).value().isApprox(f1.replicate(3, 1), 1e-14));

  const Matrix out = prompt::attention_combine(tape.constant(mat({{1, 0}})), tape.constant(mat({{1, 0}, {0, 1}}))).value();
  const double w1 = std::exp(std::tanh(1.0)) / (std::exp(std::tanh(1.0)) + 1.0);
  EXPECT_NEAR(out(0, 0), w1, 1e-14);
  EXPECT_NEAR(out(0, 1), 1.0 - w1, 1e-14);
  EXPECT_NEAR(out(0, 0), 0.68170, 5e-6);
  EXPECT_NEAR(out(0, 1), 0.31830, 5e-6);
}

TEST(AttentionCombine, MatchesOracleAndRejects) {
  num::Tape tape;
  std::mt19937_64 rng(2);
  const Matrix x = random_matrix(4, 5, rng), f = random_matrix(3, 5, rng);
  num::AttentionLog log;
  const Matrix out = prompt::attention_combine(tape.constant(x), tape.constant(f), &log).value();
  for (Eigen::Index i = 0; i < 4; ++i) EXPECT_TRUE(out.row(i).isApprox(ref_attention_combine(x.row(i), f), 1e-13));
  ASSERT_EQ(log.distributions.size(), 4u);
  for (const auto& d : log.distributions) EXPECT_NEAR(std::accumulate(d.begin(), d.end(), 0.0), 1.0, 1e-12);
  EXPECT_THROW(prompt::attention_combine(tape.constant(x), tape.constant(Matrix(0, 5))), num::NumError);
  EXPECT_THROW(prompt::attention_combine(tape.constant(x), tape.constant(Matrix::Zero(2, 4))), num::NumError);
}

TEST(PmaPool, MatchesOracleForEmptySingletonAndLargerSets) {
  num::ParamStore ps;
  prompt::init_pma_params(ps, "pma", 6, 3);
  randomize(ps, 4);
  std::mt19937_64 rng(5);
  const Matrix elems = random_matrix(5, 6, rng);
  auto seg = segments({{}, {2}, {0, 3, 4}, {0, 1, 2, 3, 4}});
  for (int heads : {1, 2, 3}) {
    num::Tape tape;
    num::Binder bind(tape, ps, false);
    num::AttentionLog log;
    const Matrix out = prompt::pma_pool(bind, "pma", heads, tape.constant(elems), seg, &log).value();
    EXPECT_TRUE(out.row(0).isZero(0.0));
    for (std::size_t r = 1; r < 4; ++r) {
      Matrix set(static_cast<Eigen::Index>(seg->row(r).size()), 6);
      Eigen::Index k = 0;
      for (auto j : seg->row(r)) set.row(k++) = elems.row(static_cast<Eigen::Index>(j));
      EXPECT_TRUE(out.row(static_cast<Eigen::Index>(r)).isApprox(ref_pma(ps, "pma", heads, set), 1e-12))
          << "heads " << heads << " row " << r;
    }
    for (const auto& d : log.distributions)
      if (!d.empty()) EXPECT_NEAR(std::accumulate(d.begin(), d.end(), 0.0), 1.0, 1e-9);
  }
}

TEST(PmaPool, PermutationInvariant) {
  num::ParamStore ps;
  prompt::init_pma_params(ps, "pma", 8, 3);
  randomize(ps, 6);
  std::mt19937_64 rng(7);
  const Matrix elems = random_matrix(7, 8, rng);
  const std::vector<Eigen::Index> perm{6, 2, 0, 5, 1, 3, 4};  // new row perm[i] holds old row i
  Matrix moved(7, 8);
  for (Eigen::Index i = 0; i < 7; ++i) moved.row(perm[static_cast<std::size_t>(i)]) = elems.row(i);
  std::vector<std::vector<std::size_t>> sets{{0, 1, 2, 3, 4, 5, 6}, {1, 4}, {3, 5, 6}};
  auto moved_sets = sets;
  for (auto& s : moved_sets) {
    for (auto& j : s) j = static_cast<std::size_t>(perm[j]);
    std::sort(s.begin(), s.end());
  }
  num::Tape tape;
  num::Binder bind(tape, ps, false);
  const Matrix a = prompt::pma_pool(bind, "pma", 4, tape.constant(elems), segments(sets)).value();
  const Matrix b = prompt::pma_pool(bind, "pma", 4, tape.constant(moved), segments(moved_sets)).value();
  EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(PmaPool, RejectsIndivisibleHeads) {
  num::ParamStore ps;
  prompt::init_pma_params(ps, "pma", 6, 3);
  num::Tape tape;
  num::Binder bind(tape, ps, false);
  EXPECT_THROW(prompt::pma_pool(bind, "pma", 4, tape.constant(Matrix::Ones(2, 6)), segments({{0, 1}})),
               num::NumError);
}

PromptConfig small_prompt(int heads = 2, Eigen::Index k = 2) {
  PromptConfig c;
  c.tokens = k;
  c.heads = heads;
  c.tau = 0.5;
  c.epochs = 5;
  c.lr = 1e-2;
  return c;
}

prompt::PromptShapes shapes(Eigen::Index du, Eigen::Index dt, Eigen::Index dk, Eigen::Index d) {
  prompt::PromptShapes s;
  s.feature_dims = {du, dt, dk};
  s.embed_dim = d;
  return s;
}

TEST(NodePrompt, StartsAsIdentityForUsers) {
  num::ParamStore ps;
  prompt::init_prompt_params(ps, small_prompt(), shapes(4, 3, 5, 4), 9);
  std::mt19937_64 rng(3);
  const Matrix x = random_matrix(3, 4, rng);
  num::Tape tape;
  num::Binder bind(tape, ps, false);
  EXPECT_TRUE(prompt::apply_user_prompt(bind, small_prompt(), tape.constant(x)).value().isApprox(x, 1e-15));
}

TEST(NodePrompt, SingleUserOneTokenMatchesHandComposition) {
  const auto cfg = small_prompt(2, 1);
  num::ParamStore ps;
  prompt::init_prompt_params(ps, cfg, shapes(4, 3, 5, 4), 9);
  randomize(ps, 10);
  std::mt19937_64 rng(4);
  encoder::TypeFeatures raw{random_matrix(1, 4, rng), random_matrix(2, 3, rng), random_matrix(3, 5, rng)};
  num::Tape tape;
  num::Binder bind(tape, ps, false);
  const auto out = prompt::apply_node_prompt(bind, cfg, testing::constants(tape, raw));
  // K = 1: Att(x, F^C) is the single token of each class.
  Matrix set(2, 4);
  set.row(0) = ps.at("prompt.F.participant").value.row(0);
  set.row(1) = ps.at("prompt.F.benign").value.row(0);
  const Eigen::RowVectorXd expect = raw[0].row(0) + ref_pma(ps, "prompt.node_pma", cfg.heads, set);
  EXPECT_TRUE(out[0].value().row(0).isApprox(expect, 1e-12));
  for (std::size_t k = 1; k < 3; ++k) {
    const auto& bank = ps.at(k == 1 ? "prompt.F.tweet" : "prompt.F.keyword").value;
    ASSERT_EQ(out[k].rows(), raw[k].rows());
    ASSERT_EQ(out[k].cols(), raw[k].cols());
    for (Eigen::Index i = 0; i < raw[k].rows(); ++i)
      EXPECT_TRUE(out[k].value().row(i).isApprox(raw[k].row(i) + ref_attention_combine(raw[k].row(i), bank), 1e-12));
  }
}

TEST(NodePrompt, ManyTokensMatchOracleAndIdenticalRowsStayIdentical) {
  const auto cfg = small_prompt(2, 3);
  num::ParamStore ps;
  prompt::init_prompt_params(ps, cfg, shapes(4, 3, 5, 4), 9);
  randomize(ps, 11);
  std::mt19937_64 rng(5);
  Matrix users = random_matrix(4, 4, rng);
  users.row(3) = users.row(1);
  num::Tape tape;
  num::Binder bind(tape, ps, false);
  const Matrix out = prompt::apply_user_prompt(bind, cfg, tape.constant(users)).value();
  EXPECT_EQ(out.row(3), out.row(1));
  EXPECT_EQ(out.rows(), 4);
  EXPECT_EQ(out.cols(), 4);
  for (Eigen::Index i = 0; i < 4; ++i) {
    Matrix set(2, 4);
    set.row(0) = ref_attention_combine(users.row(i), ps.at("prompt.F.participant").value);
    set.row(1) = ref_attention_combine(users.row(i), ps.at("prompt.F.benign").value);
    EXPECT_TRUE(out.row(i).isApprox(users.row(i) + ref_pma(ps, "prompt.node_pma", cfg.heads, set), 1e-12)) << i;
  }
}

TEST(NodePrompt, MissingTokenBankRejected) {
  const auto cfg = small_prompt();
  num::ParamStore ps;
  prompt::init_prompt_params(ps, cfg, shapes(4, 3, 5, 4), 9);
  num::ParamStore partial;
  for (const auto* p : ps.all())
    if (p->name != "prompt.F.keyword") partial.add(p->name, p->value);
  std::mt19937_64 rng(6);
  encoder::TypeFeatures raw{random_matrix(1, 4, rng), random_matrix(2, 3, rng), random_matrix(3, 5, rng)};
  num::Tape tape;
  num::Binder bind(tape, partial, false);
  EXPECT_THROW(prompt::apply_node_prompt(bind, cfg, testing::constants(tape, raw)), num::NumError);
}

/// u0 and u1 are joined on every meta-path; u2 is isolated.
HeteroGraph agreeing_graph() {
  return build_graph({{"u0", NodeType::kUser, "a"}, {"u1", NodeType::kUser, "b"}, {"u2", NodeType::kUser, "c"},
                      {"t0", NodeType::kTweet, "d"}, {"k0", NodeType::kKeyword, "e"}},
                     {{"u0", "t0", Relation::kR2}, {"u1", "t0", Relation::kR3}, {"t0", "k0", Relation::kR5},
                      {"u0", "k0", Relation::kR4}, {"u1", "k0", Relation::kR4}},
                     {});
}

Matrix run_structure(const num::ParamStore& ps, const PromptConfig& cfg, const HeteroGraph& g, const Matrix& z,
                     num::AttentionLog* log = nullptr) {
  auto ctx = encoder::make_context(g);
  num::Tape tape;
  num::Binder bind(tape, const_cast<num::ParamStore&>(ps), false);
  return prompt::structure_prompt(bind, cfg, ctx, tape.constant(z), log).value();
}

TEST(StructurePrompt, AgreeingMetapathsAndIsolatedNode) {
  const auto cfg = small_prompt();
  num::ParamStore ps;
  prompt::init_prompt_params(ps, cfg, shapes(4, 4, 4, 4), 12);
  randomize(ps, 13);
  const auto g = agreeing_graph();
  for (auto p : kAllMetaPaths) {
    const auto adj = metapath_adjacency(g, p);
    ASSERT_TRUE(adj.has(0, 1)) << to_string(p);
  }
  std::mt19937_64 rng(8);
  const Matrix z = random_matrix(3, 4, rng);
  const Matrix s = run_structure(ps, cfg, g, z);
  // Every branch equals H, so S = H.
  EXPECT_TRUE(s.row(0).isApprox(ref_pma(ps, "prompt.struct_pma", cfg.heads, z.row(1)), 1e-12));
  EXPECT_TRUE(s.row(1).isApprox(ref_pma(ps, "prompt.struct_pma", cfg.heads, z.row(0)), 1e-12));
  EXPECT_TRUE(s.row(2).isZero(0.0));
}

TEST(StructurePrompt, LineGraphMatchesBruteForceOracle) {
  const auto cfg = small_prompt();
  num::ParamStore ps;
  prompt::init_prompt_params(ps, cfg, shapes(4, 4, 4, 6), 14);
  randomize(ps, 15);
  const auto g = build_graph(
      {{"u0", NodeType::kUser, "a"}, {"u1", NodeType::kUser, "b"}, {"u2", NodeType::kUser, "c"},
       {"t0", NodeType::kTweet, "d"}, {"t1", NodeType::kTweet, "e"}, {"k0", NodeType::kKeyword, "f"}},
      {{"u0", "t0", Relation::kR2}, {"u1", "t0", Relation::kR2}, {"u1", "t1", Relation::kR2},
       {"u2", "t1", Relation::kR3}, {"t0", "k0", Relation::kR6}, {"u2", "k0", Relation::kR4}},
      {});
  std::mt19937_64 rng(9);
  const Matrix z = random_matrix(3, 6, rng);
  num::AttentionLog log;
  const Matrix s = run_structure(ps, cfg, g, z, &log);
  std::vector<Matrix> branches;
  for (auto p : kAllMetaPaths) {
    const auto pairs = testing::brute_force_metapath(g, p);
    Matrix h = Matrix::Zero(3, 6);
    for (std::size_t i = 0; i < 3; ++i) {
      std::vector<Eigen::Index> nb;
      for (const auto& [a, b] : pairs)
        if (a == i) nb.push_back(static_cast<Eigen::Index>(b));
      Matrix set(static_cast<Eigen::Index>(nb.size()), 6);
      for (std::size_t k = 0; k < nb.size(); ++k) set.row(static_cast<Eigen::Index>(k)) = z.row(nb[k]);
      h.row(static_cast<Eigen::Index>(i)) = ref_pma(ps, "prompt.struct_pma", cfg.heads, set);
    }
    branches.push_back(h);
  }
  EXPECT_TRUE(s.isApprox(ref_semantic(ps, "prompt.sem", branches), 1e-12));
  for (const auto& d : log.distributions)
    if (!d.empty()) EXPECT_NEAR(std::accumulate(d.begin(), d.end(), 0.0), 1.0, 1e-9);
}

TEST(StructurePrompt, InvariantToNeighbourOrdering) {
  const auto cfg = small_prompt();
  num::ParamStore ps;
  prompt::init_prompt_params(ps, cfg, shapes(4, 4, 4, 4), 16);
  randomize(ps, 17);
  const auto base = testing::small_graph();
  const std::vector<int> perm{2, 5, 0, 4, 3, 1};
  auto rename = [&](const std::string& id) {
    return id[0] == 'u' ? "u" + std::to_string(perm[static_cast<std::size_t>(std::stoi(id.substr(1)))]) : id;
  };
  std::vector<NodeRecord> nodes;
  for (const auto& n : base.nodes()) nodes.push_back({rename(n.id), n.type, n.text});
  std::vector<EdgeRecord> edges;
  for (const auto& e : base.edges()) edges.push_back({rename(e.src), rename(e.dst), e.rel});
  const auto moved = build_graph(nodes, edges, {});
  std::mt19937_64 rng(10);
  const Matrix z = random_matrix(6, 4, rng);
  Matrix zm(6, 4);
  for (std::size_t i = 0; i < 6; ++i) zm.row(perm[i]) = z.row(static_cast<Eigen::Index>(i));
  const Matrix a = run_structure(ps, cfg, base, z);
  const Matrix b = run_structure(ps, cfg, moved, zm);
  for (std::size_t i = 0; i < 6; ++i)
    EXPECT_LE((b.row(perm[i]) - a.row(static_cast<Eigen::Index>(i))).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Prototypes, ClassMeans) {
  const Matrix z = mat({{2, 4}, {1, 0}, {0, 1}, {7, -3}, {5, 5}});
  const Matrix c = prompt::init_prototypes(z, {0, 1, 2}, {Label::kParticipant, Label::kBenign, Label::kBenign});
  EXPECT_EQ(c.row(0), z.row(0));
  EXPECT_EQ(c(1, 0), 0.5);
  EXPECT_EQ(c(1, 1), 0.5);
  std::mt19937_64 rng(11);
  const Matrix r = random_matrix(9, 3, rng);
  std::vector<std::size_t> rows{0, 2, 3, 5, 6, 8};
  std::vector<Label> labels{Label::kBenign, Label::kParticipant, Label::kBenign,
                            Label::kParticipant, Label::kBenign, Label::kParticipant};
  const Matrix got = prompt::init_prototypes(r, rows, labels);
  Eigen::RowVectorXd p = Eigen::RowVectorXd::Zero(3), n = Eigen::RowVectorXd::Zero(3);
  for (std::size_t i = 0; i < rows.size(); ++i)
    (labels[i] == Label::kParticipant ? p : n) += r.row(static_cast<Eigen::Index>(rows[i]));
  EXPECT_EQ(got.row(prompt::kParticipantRow), p / 3.0);
  EXPECT_EQ(got.row(prompt::kBenignRow), n / 3.0);
  const Matrix same = Matrix::Constant(4, 3, 1.25);
  EXPECT_EQ(prompt::init_prototypes(same, {0, 1, 2, 3}, {Label::kBenign, Label::kParticipant, Label::kBenign,
                                                          Label::kParticipant}),
            Matrix::Constant(2, 3, 1.25));
  EXPECT_THROW(prompt::init_prototypes(z, {0, 1}, {Label::kBenign, Label::kBenign}), num::NumError);
}

double ortho(const Matrix& c) {
  num::Tape tape;
  return prompt::orthogonality_loss(tape.constant(c)).scalar();
}

TEST(Orthogonality, ClosedFormCases) {
  EXPECT_EQ(ortho(mat({{1, 0, 0}, {0, 1, 0}})), 0.0);
  EXPECT_EQ(ortho(mat({{1, 0, 0}, {1, 0, 0}})), 2.0);
  std::mt19937_64 rng(12);
  const Matrix c = random_matrix(2, 4, rng);
  const Eigen::HouseholderQR<Matrix> qr(random_matrix(4, 4, rng));
  const Matrix q = qr.householderQ();
  EXPECT_NEAR(ortho(c * q), ortho(c), 1e-12);
  const Matrix cc = c * c.transpose() - Matrix::Identity(2, 2);
  EXPECT_NEAR(ortho(c), cc.squaredNorm(), 1e-12);
}

double tloss(const Matrix& z, const Matrix& c, std::vector<int> t, double tau, double lambda) {
  num::Tape tape;
  return prompt::tuning_loss(tape.constant(z), tape.constant(c), t, tau, lambda).scalar();
}

TEST(TuningLoss, HandCasesAndInvariances) {
  const Matrix eye = Matrix::Identity(2, 2);
  EXPECT_NEAR(tloss(mat({{1, 0}}), eye, {0}, 1.0, 0.0), -std::log(std::exp(1.0) / (std::exp(1.0) + 1.0)), 1e-12);
  EXPECT_NEAR(tloss(mat({{1, 0}}), eye, {0}, 1.0, 0.0), 0.31326, 1e-5);
  EXPECT_EQ(tloss(mat({{1, 0}}), eye, {0}, 1.0, 5.0), tloss(mat({{1, 0}}), eye, {0}, 1.0, 0.0));
  std::mt19937_64 rng(13);
  const Matrix z = random_matrix(5, 3, rng), c = random_matrix(2, 3, rng);
  const std::vector<int> t{0, 1, 1, 0, 1};
  EXPECT_NEAR(tloss(2.0 * z, c, t, 0.5, 0.0), tloss(z, c, t, 0.5, 0.0), 1e-12);
  EXPECT_NEAR(tloss(z, c, t, 0.5, 0.3) - tloss(z, c, t, 0.5, 0.0), 0.3 * ortho(c), 1e-12);
  EXPECT_THROW(tloss(z, c, t, 0.0, 0.0), num::NumError);
}

TEST(TuningLoss, GradientMatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::mt19937_64 rng(seed + 100);
    const auto n = static_cast<Eigen::Index>(2 + seed), d = static_cast<Eigen::Index>(3 + seed);
    num::ParamStore ps;
    ps.add("z", random_matrix(n, d, rng));
    ps.add("c", random_matrix(2, d, rng));
    std::vector<int> t;
    for (Eigen::Index i = 0; i < n; ++i) t.push_back(static_cast<int>(i % 2));
    auto eval = [&] {
      num::Tape tape;
      num::Binder b(tape, ps, false);
      return prompt::tuning_loss(b("z"), b("c"), t, 0.5, 0.1).scalar();
    };
    num::Tape tape;
    num::Binder b(tape, ps, true);
    ps.zero_grad();
    tape.backward(prompt::tuning_loss(b("z"), b("c"), t, 0.5, 0.1));
    EXPECT_LT(testing::max_fd_rel_error(ps.all(), eval), 1e-4) << "seed " << seed;
  }
}

encoder::EncoderConfig tiny_encoder() {
  encoder::EncoderConfig e;
  e.in_dims = {4, 4, 4};
  e.hidden_dim = 4;
  e.layers = 1;
  e.dropout = 0.0;
  return e;
}

TEST(TuningLoss, GradientThroughWholePromptedModel) {
  // Every prompt tensor reaches the loss through node prompt, encoder,
  // structure prompt, projection and prototypes.
  const auto g = testing::small_graph();
  SplitAssignment split;
  split.train = {"u0", "u1", "u3", "u4"};
  split.val = {"u2", "u5"};
  const auto enc_cfg = tiny_encoder();
  auto data = prompt::make_tune_data(g, testing::random_features(g, enc_cfg.in_dims, 3), split);
  std::vector<int> targets;
  for (auto l : data.train_labels) targets.push_back(prompt::prototype_row(l));
  for (bool after : {true, false}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      num::ParamStore enc;
      encoder::init_encoder_params(enc, enc_cfg, seed);
      auto cfg = small_prompt();
      cfg.delta = 0.5;
      cfg.lambda = 0.1;
      cfg.mix_after_projection = after;
      num::ParamStore ps;
      prompt::init_prompt_params(ps, cfg, shapes(4, 4, 4, 4), seed);
      randomize(ps, seed + 50, 0.3);
      auto loss_on = [&](num::Tape& tape, bool train) {
        num::Binder e(tape, enc, false);
        num::Binder p(tape, ps, train);
        auto f = prompt::forward(e, p, enc_cfg, cfg, data);
        return prompt::tuning_loss(num::gather_rows(f.z_prime, data.train_rows), f.c_proj, targets, cfg.tau,
                                   cfg.lambda, p("prompt.C"));
      };
      auto eval = [&] {
        num::Tape tape;
        return loss_on(tape, false).scalar();
      };
      num::Tape tape;
      ps.zero_grad();
      tape.backward(loss_on(tape, true));
      std::vector<num::Parameter*> used;
      for (auto* p : ps.all())
        if (!p->name.starts_with("prompt.head.") && p->name != "prompt.F.tweet" && p->name != "prompt.F.keyword")
          used.push_back(p);
      EXPECT_LT(testing::max_fd_rel_error(used, eval), 1e-4) << "seed " << seed << " after " << after;
    }
  }
}

TEST(Predict, CosineDecisionsAndTieBreak) {
  const Matrix c = mat({{1, 0}, {0, 1}});
  EXPECT_EQ(prompt::predict(c.row(0), c), Label::kParticipant);
  EXPECT_EQ(prompt::predict(c.row(1), c), Label::kBenign);
  Eigen::RowVectorXd mid(2);
  mid << 1, 1;
  EXPECT_EQ(prompt::predict(mid, c), Label::kParticipant);
  EXPECT_EQ(prompt::predict(-c.row(0), c), Label::kBenign);
  std::mt19937_64 rng(14);
  const Matrix cr = random_matrix(2, 5, rng);
  for (int i = 0; i < 50; ++i) {
    const Eigen::RowVectorXd z = random_matrix(1, 5, rng);
    EXPECT_EQ(prompt::predict(z, cr), prompt::predict(3.7 * z, cr));
  }
  EXPECT_THROW(prompt::predict(Eigen::RowVectorXd::Zero(2), c), num::NumError);
  EXPECT_EQ(prompt::decide_all(mat({{0.3, 0.3}, {0.1, 0.2}, {0.5, -1}})),
            (std::vector<Label>{Label::kParticipant, Label::kBenign, Label::kParticipant}));
}

TEST(TuneData, SyntheticUsersJoinTraining) {
  const auto base = testing::small_graph();
  std::vector<NodeRecord> nodes = base.nodes();
  nodes.push_back({"syn:u0", NodeType::kUser, "s"});
  auto labels = base.labels();
  labels["syn:u0"] = Label::kParticipant;
  const auto g = build_graph(nodes, base.edges(), labels);
  SplitAssignment split;
  split.train = {"u0", "u3"};
  split.val = {"u1", "u4"};
  split.test = {"u2", "u5"};
  const auto d = prompt::make_tune_data(g, testing::random_features(g, {4, 4, 4}, 1), split);
  std::vector<std::string> train_ids;
  for (auto r : d.train_rows) train_ids.push_back(g.node_at(NodeType::kUser, r).id);
  EXPECT_EQ(train_ids, (std::vector<std::string>{"u0", "u3", "syn:u0"}));
  EXPECT_EQ(d.train_labels, (std::vector<Label>{Label::kParticipant, Label::kBenign, Label::kParticipant}));
  EXPECT_EQ(d.val_rows.size(), 2u);
  split.val.push_back("nobody");
  EXPECT_THROW(prompt::make_tune_data(g, testing::random_features(g, {4, 4, 4}, 1), split), GraphError);
}

struct Tuning {
  std::shared_ptr<HeteroGraph> g;
  encoder::EncoderConfig enc_cfg;
  num::ParamStore enc;
  prompt::TuneData data;
};

std::unique_ptr<Tuning> synthetic_tuning(std::uint64_t seed) {
  auto t = std::make_unique<Tuning>();
  synth::SynthConfig sc;
  sc.seed = seed;
  t->g = std::make_shared<HeteroGraph>(synth::generate(sc));
  t->enc_cfg.in_dims = {64, 64, 64};
  t->enc_cfg.hidden_dim = 16;
  t->enc_cfg.layers = 2;
  encoder::init_encoder_params(t->enc, t->enc_cfg, seed);
  const auto split = stratified_split(*t->g, 0.2, 0.1, seed);
  t->data = prompt::make_tune_data(*t->g, augment::embed_graph(*t->g, augment::HashEmbedder(64, seed)), split);
  return t;
}

TEST(RunPromptTune, ZeroEpochsReturnsInitialState) {
  auto t = synthetic_tuning(1);
  auto cfg = small_prompt(4, 4);
  cfg.epochs = 0;
  const auto res = prompt::run_prompt_tune(t->enc, t->enc_cfg, t->data, cfg);
  const auto init = prompt::initial_prompt_state(t->enc, t->enc_cfg, t->data, cfg);
  for (const auto* p : init.all()) EXPECT_EQ(res.params.at(p->name).value, p->value) << p->name;
  ASSERT_EQ(res.trace.size(), 1u);
  EXPECT_EQ(res.best_epoch, 0);
  // Node prompt starts as the identity, so C holds the class means of Z.
  num::Tape tape;
  num::Binder enc(tape, t->enc, false);
  encoder::TypeVars raw;
  raw[0] = tape.constant(t->data.features[0]);
  const Matrix z = encoder::encode_target(enc, t->enc_cfg, t->data.ctx, raw, encoder::Mode{}).value();
  EXPECT_TRUE(res.params.at("prompt.C").value.isApprox(
      prompt::init_prototypes(z, t->data.train_rows, t->data.train_labels), 1e-13));
}

TEST(RunPromptTune, EncoderFrozenDeterministicAndLossFalls) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto t = synthetic_tuning(seed);
    const auto before = t->enc.clone();
    auto cfg = small_prompt(4, 4);
    cfg.epochs = 20;
    cfg.seed = seed;
    const auto a = prompt::run_prompt_tune(t->enc, t->enc_cfg, t->data, cfg);
    for (const auto* p : before.all()) EXPECT_EQ(t->enc.at(p->name).value, p->value) << p->name;
    EXPECT_LT(a.trace.back().loss, a.trace.front().loss) << "seed " << seed;
    const auto b = prompt::run_prompt_tune(t->enc, t->enc_cfg, t->data, cfg);
    ASSERT_EQ(a.trace.size(), b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) EXPECT_EQ(a.trace[i].loss, b.trace[i].loss);
    double best = -1;
    for (const auto& r : a.trace) best = std::max(best, r.val_macro_f1);
    EXPECT_EQ(a.trace[static_cast<std::size_t>(a.best_epoch)].val_macro_f1, best);
    const auto pred = prompt::predict_all(t->enc, t->enc_cfg, a.params, cfg, t->data);
    EXPECT_EQ(pred, prompt::decide_all(a.best_logits));
  }
}

TEST(RunPromptTune, AblationSwitchesTrain) {
  auto t = synthetic_tuning(4);
  for (int v = 0; v < 4; ++v) {
    auto cfg = small_prompt(4, 4);
    cfg.epochs = 10;
    if (v == 0) cfg.node_prompt = false;
    if (v == 1) cfg.structure_prompt = false;
    if (v == 2) cfg.head = prompt::Head::kLinear;
    if (v == 3) cfg.projection = false;
    const auto r = prompt::run_prompt_tune(t->enc, t->enc_cfg, t->data, cfg);
    EXPECT_LT(r.trace.back().loss, r.trace.front().loss) << "variant " << v;
  }
}

TEST(Orthogonality, LargeLambdaDrivesPrototypesOrthonormal) {
  std::mt19937_64 rng(15);
  const Matrix z = random_matrix(20, 6, rng);
  std::vector<int> targets;
  for (int i = 0; i < 20; ++i) targets.push_back(i % 2);
  num::ParamStore ps;
  ps.add("c", random_matrix(2, 6, rng, 2.0));
  num::OptimizerState opt;
  opt.config.lr = 1e-2;
  std::vector<double> trace;
  for (int step = 0; step <= 200; ++step) {
    num::Tape tape;
    num::Binder b(tape, ps, true);
    trace.push_back(ortho(ps.at("c").value));
    ps.zero_grad();
    tape.backward(prompt::tuning_loss(tape.constant(z), b("c"), targets, 0.5, 1e3));
    num::adam_step(ps.all(), opt);
  }
  int upticks = 0;
  for (std::size_t i = 1; i < trace.size(); ++i)
    if (trace[i] > trace[i - 1]) ++upticks;
  EXPECT_LT(trace.back(), trace.front());
  EXPECT_LE(upticks, static_cast<int>(0.05 * static_cast<double>(trace.size() - 1)));
}

TEST(PromptConfig, Validation) {
  PromptConfig c;
  EXPECT_NO_THROW(c.validate());
  c.tau = 0;
  EXPECT_THROW(c.validate(), num::NumError);
  c = PromptConfig{};
  c.delta = -1;
  EXPECT_THROW(c.validate(), num::NumError);
  c = PromptConfig{};
  c.tokens = 0;
  EXPECT_THROW(c.validate(), num::NumError);
  num::ParamStore ps;
  EXPECT_THROW(prompt::init_prompt_params(ps, small_prompt(3), shapes(4, 4, 4, 4), 1), num::NumError);
}

}  // namespace
}  // namespace hetgdt
