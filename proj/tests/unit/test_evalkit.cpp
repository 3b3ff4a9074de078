// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <filesystem>
#include <random>

#include "hetgdt/ablation.hpp"
#include "hetgdt/augment/augment.hpp"
#include "hetgdt/augment/embedder.hpp"
#include "hetgdt/augment/llm.hpp"
#include "hetgdt/metrics.hpp"
#include "hetgdt/synthgen.hpp"

namespace hetgdt::eval {
namespace {

/// Counts every cell by brute force and evaluates the textbook formulas.
struct OracleScores {
  double macro, gm;
};

OracleScores oracle(const std::vector<int>& t, const std::vector<int>& p) {
  double cell[2][2] = {{0, 0}, {0, 0}};  // [truth][prediction]
  for (std::size_t i = 0; i < t.size(); ++i) cell[t[i]][p[i]] += 1;
  auto f1 = [&](int c) {
    const double tp = cell[c][c], fp = cell[1 - c][c], fn = cell[c][1 - c];
    const double prec = tp + fp == 0 ? 0 : tp / (tp + fp);
    const double rec = tp + fn == 0 ? 0 : tp / (tp + fn);
    return prec + rec == 0 ? 0 : 2 * prec * rec / (prec + rec);
  };
  auto recall = [&](int c) {
    const double n = cell[c][0] + cell[c][1];
    return n == 0 ? 0 : cell[c][c] / n;
  };
  return {50.0 * (f1(0) + f1(1)), 100.0 * std::sqrt(recall(1) * recall(0))};
}

TEST(Metrics, HandDerivedCases) {
  const std::vector<int> t{1, 1, 0, 0}, p{1, 0, 0, 0};
  EXPECT_NEAR(macro_f1(t, p), (2.0 / 3.0 + 4.0 / 5.0) / 2.0 * 100.0, 1e-12);
  EXPECT_NEAR(macro_f1(t, p), 73.33, 5e-3);
  EXPECT_NEAR(gmean(t, p), 70.71, 5e-3);
  EXPECT_EQ(macro_f1(t, t), 100.0);
  EXPECT_EQ(gmean(t, t), 100.0);
  EXPECT_EQ(macro_f1(t, {0, 0, 1, 1}), 0.0);
  EXPECT_EQ(gmean(t, {0, 0, 0, 0}), 0.0);
  const auto c = confusion_matrix(t, p);
  EXPECT_EQ(c.tp, 1u);
  EXPECT_EQ(c.fn, 1u);
  EXPECT_EQ(c.tn, 2u);
  EXPECT_EQ(c.fp, 0u);
  EXPECT_EQ(c.total(), 4u);
}

TEST(Metrics, ZeroDivisionConvention) {
  // No participant in truth or prediction: its F1 counts as 0.
  EXPECT_EQ(macro_f1({0, 0, 0}, {0, 0, 0}), 50.0);
  EXPECT_EQ(gmean({0, 0, 0}, {0, 0, 0}), 0.0);
}

TEST(Metrics, RejectsBadInput) {
  EXPECT_THROW(macro_f1({1, 0}, {1}), std::invalid_argument);
  EXPECT_THROW(gmean({}, {}), std::invalid_argument);
  EXPECT_THROW(macro_f1({2, 0}, {1, 0}), std::invalid_argument);
}

TEST(Metrics, MatchOracleOnRandomLabelsAndStayInRange) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> len(1, 60);
  std::bernoulli_distribution bit(0.3);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = len(rng);
    std::vector<int> t(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = bit(rng);
      p[i] = bit(rng);
    }
    const auto o = oracle(t, p);
    const auto m = compute_metrics(t, p);
    ASSERT_NEAR(m.macro_f1, o.macro, 1e-9);
    ASSERT_NEAR(m.gmean, o.gm, 1e-9);
    ASSERT_NEAR(m.macro_f1, (m.minority_f1 + m.majority_f1) / 2.0, 1e-9);
    for (double v : {m.macro_f1, m.gmean, m.minority_f1, m.majority_f1}) {
      ASSERT_GE(v, 0.0);
      ASSERT_LE(v, 100.0);
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<int> ts(n), ps(n);
    for (std::size_t i = 0; i < n; ++i) {
      ts[i] = t[order[i]];
      ps[i] = p[order[i]];
    }
    ASSERT_NEAR(macro_f1(ts, ps), m.macro_f1, 1e-12);
    ASSERT_NEAR(gmean(ts, ps), m.gmean, 1e-12);
  }
}

TEST(Variant, NamesRoundTripAndUnknownRejected) {
  for (auto v : all_variants()) EXPECT_EQ(parse_variant(to_string(v)), v);
  EXPECT_EQ(parse_variant("A1"), Variant::kA1);
  EXPECT_EQ(parse_variant("no-aug"), Variant::kNoAug);
  EXPECT_THROW(parse_variant("A9"), std::invalid_argument);
  EXPECT_THROW(parse_variant(""), std::invalid_argument);
}

TEST(Variant, RemovalSemantics) {
  prompt::PromptConfig full;
  const auto a1 = variant_config(Variant::kA1, full);
  EXPECT_FALSE(a1.node_prompt);
  EXPECT_FALSE(a1.structure_prompt);
  EXPECT_EQ(a1.head, prompt::Head::kLinear);
  const auto a2 = variant_config(Variant::kA2, full);
  EXPECT_EQ(a2.head, prompt::Head::kLinear);
  EXPECT_TRUE(a2.node_prompt && a2.structure_prompt);
  const auto a3 = variant_config(Variant::kA3, full);
  EXPECT_FALSE(a3.node_prompt);
  EXPECT_TRUE(a3.structure_prompt);
  EXPECT_EQ(a3.head, prompt::Head::kPrototype);
  const auto a4 = variant_config(Variant::kA4, full);
  EXPECT_TRUE(a4.node_prompt);
  EXPECT_FALSE(a4.structure_prompt);
  const auto na = variant_config(Variant::kNoAug, full);
  EXPECT_TRUE(na.node_prompt && na.structure_prompt);
  EXPECT_EQ(na.head, prompt::Head::kPrototype);
}

TEST(Report, RoundTrip) {
  std::vector<ReportRow> rows;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 100);
  for (auto v : all_variants())
    for (const char* split : {"test", "val"})
      rows.push_back({std::string(to_string(v)), rng() % 1000, split, {u(rng), u(rng), u(rng), u(rng)}});
  const auto path = std::filesystem::temp_directory_path() / "hetgdt_report_roundtrip.csv";
  write_report(path, rows);
  EXPECT_EQ(read_report(path), rows);
  std::ifstream f(path);
  std::string header;
  std::getline(f, header);
  EXPECT_EQ(header, kReportHeader);
  std::filesystem::remove(path);
}

struct Fixture {
  std::shared_ptr<HeteroGraph> g;
  HeteroGraph merged;
  PipelineInputs in;
  num::ParamStore enc;
};

std::unique_ptr<Fixture> fixture(std::uint64_t seed) {
  auto f = std::make_unique<Fixture>();
  synth::SynthConfig sc;
  sc.seed = seed;
  f->g = std::make_shared<HeteroGraph>(synth::generate(sc));
  f->in.split = stratified_split(*f->g, 0.2, 0.1, seed);
  augment::MockLlmClient mock;
  const augment::HashEmbedder emb(32, seed);
  f->merged = augment::augment_graph(f->g, f->in.split, mock, emb).merged();
  f->in.original = f->g.get();
  f->in.augmented = &f->merged;
  f->in.original_features = augment::embed_graph(*f->g, emb);
  f->in.augmented_features = augment::embed_graph(f->merged, emb);
  f->in.encoder_config.in_dims = {32, 32, 32};
  f->in.encoder_config.hidden_dim = 16;
  encoder::init_encoder_params(f->enc, f->in.encoder_config, seed);
  f->in.encoder = &f->enc;
  f->in.prompt.epochs = 6;
  f->in.prompt.tokens = 4;
  f->in.prompt.heads = 4;
  f->in.seed = seed;
  return f;
}

TEST(Ablation, EveryVariantRunsAndIsDeterministic) {
  auto f = fixture(2);
  for (auto v : all_variants()) {
    const auto a = run_ablation(v, f->in);
    const auto b = run_ablation(v, f->in);
    EXPECT_EQ(a.test, b.test) << to_string(v);
    EXPECT_EQ(a.val, b.val) << to_string(v);
    EXPECT_EQ(a.test.variant, to_string(v));
    EXPECT_EQ(a.test.split, "test");
    EXPECT_EQ(a.val.split, "val");
    EXPECT_EQ(a.test.seed, 2u);
    EXPECT_FALSE(a.trace.empty());
  }
}

TEST(Ablation, NoAugmentationOnlySwapsTheGraph) {
  auto f = fixture(3);
  PipelineInputs same = f->in;
  same.augmented = same.original;
  same.augmented_features = same.original_features;
  const auto full = run_ablation(Variant::kFull, same);
  const auto noaug = run_ablation(Variant::kNoAug, f->in);
  EXPECT_EQ(full.test.metrics, noaug.test.metrics);
  EXPECT_EQ(full.val.metrics, noaug.val.metrics);
}

TEST(Ablation, ScoresMatchIdsOrder) {
  auto f = fixture(4);
  const auto& ids = f->in.split.test;
  const auto truth = f->g->user_labels();
  std::vector<Label> exact, flipped;
  for (const auto& l : truth) {
    const auto v = l.value_or(Label::kBenign);
    exact.push_back(v);
    flipped.push_back(v == Label::kParticipant ? Label::kBenign : Label::kParticipant);
  }
  EXPECT_EQ(score_ids(*f->g, ids, exact).macro_f1, 100.0);
  EXPECT_EQ(score_ids(*f->g, ids, flipped).macro_f1, 0.0);
  EXPECT_THROW(score_ids(*f->g, {"nobody"}, exact), std::exception);
}

}  // namespace
}  // namespace hetgdt::eval
