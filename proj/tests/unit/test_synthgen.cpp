// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hetgdt/augment/llm.hpp"
#include "hetgdt/augment/text.hpp"
#include "hetgdt/graph_io.hpp"
#include "hetgdt/synthgen.hpp"

namespace hetgdt::synth {
namespace {

namespace fs = std::filesystem;

std::vector<Relation> all_relations() {
  std::vector<Relation> out;
  for (std::size_t r = 0; r < kNumRelations; ++r) out.push_back(static_cast<Relation>(r));
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::size_t count_participants(const HeteroGraph& g) {
  std::size_t n = 0;
  for (const auto& [id, l] : g.labels()) n += l == Label::kParticipant;
  return n;
}

double participant_pair_fraction(const HeteroGraph& g) {
  std::size_t both = 0, total = 0;
  for (const auto& e : g.edges()) {
    if (e.rel != Relation::kR1) continue;
    ++total;
    both += g.label(e.src) == Label::kParticipant && g.label(e.dst) == Label::kParticipant;
  }
  return total == 0 ? 0.0 : static_cast<double>(both) / static_cast<double>(total);
}

TEST(Generate, MinorityCountIsRounded) {
  SynthConfig c;
  const auto g = generate(c);
  EXPECT_EQ(g.num_nodes(NodeType::kUser), 200u);
  EXPECT_EQ(count_participants(g), 24u);
  EXPECT_EQ(g.labels().size(), 200u);
  for (std::size_t n : {200u, 333u, 1000u, 2000u}) {
    c.n_users = n;
    EXPECT_EQ(count_participants(generate(c)),
              static_cast<std::size_t>(std::llround(static_cast<double>(n) * 0.119)));
  }
}

TEST(Generate, HomophilyRaisesParticipantFollowFraction) {
  for (std::uint64_t seed : {0u, 1u, 2u}) {
    SynthConfig c;
    c.n_users = 500;
    c.seed = seed;
    c.homophily = 0.0;
    const double low = participant_pair_fraction(generate(c));
    c.homophily = 1.0;
    const double high = participant_pair_fraction(generate(c));
    EXPECT_GT(high, low) << "seed " << seed;
  }
}

TEST(Generate, AllRelationsPopulatedAndGraphRebuilds) {
  SynthConfig c;
  c.seed = 9;
  const auto g = generate(c);
  for (auto r : all_relations()) EXPECT_GT(g.num_edges(r), 0u) << to_string(r);
  // Passing through the validating builder reproduces the same graph.
  const auto again = build_graph(g.nodes(), g.edges(), g.labels());
  EXPECT_EQ(again.nodes().size(), g.nodes().size());
  EXPECT_EQ(again.edges().size(), g.edges().size());
}

TEST(Generate, SameSeedGivesByteIdenticalFiles) {
  SynthConfig c;
  c.seed = 42;
  const auto base = fs::temp_directory_path() / "hetgdt_synth_det";
  fs::remove_all(base);
  write_synthetic(generate(c), base / "a");
  write_synthetic(generate(c), base / "b");
  for (const char* f : {"graph.jsonl", "labels.csv", "stats.json"}) {
    const auto a = slurp(base / "a" / f);
    EXPECT_FALSE(a.empty()) << f;
    EXPECT_EQ(a, slurp(base / "b" / f)) << f;
  }
  c.seed = 43;
  write_synthetic(generate(c), base / "c");
  EXPECT_NE(slurp(base / "a" / "graph.jsonl"), slurp(base / "c" / "graph.jsonl"));
  fs::remove_all(base);
}

TEST(Generate, RealizedImbalanceNearTarget) {
  for (double frac : {0.119, 0.2, 0.35}) {
    for (std::size_t n : {200u, 2000u}) {
      SynthConfig c;
      c.n_users = n;
      c.minority_fraction = frac;
      const auto s = stats(generate(c));
      const double target = (1.0 - frac) / frac;
      EXPECT_LE(std::abs(s.cir - target) / target, 0.05) << frac << " " << n;
    }
  }
}

TEST(Generate, EveryParticipantProfileCarriesADrugTerm) {
  for (std::uint64_t seed : {0u, 5u, 11u}) {
    SynthConfig c;
    c.seed = seed;
    const auto g = generate(c);
    for (const auto& n : g.nodes()) {
      if (n.type != NodeType::kUser || g.label(n.id) != Label::kParticipant) continue;
      const auto profile = augment::parse_user_text(n.text, n.id).profile;
      bool found = false;
      for (const auto& tok : augment::tokenize(profile)) found = found || augment::is_drug_term(tok);
      EXPECT_TRUE(found) << n.id << ": " << profile;
    }
  }
}

TEST(Generate, DefaultDrugTermsAreRecognized) {
  for (const auto& t : default_drug_terms()) EXPECT_TRUE(augment::is_drug_term(t)) << t;
  for (const auto& t : default_neutral_terms()) EXPECT_FALSE(augment::is_drug_term(t)) << t;
}

TEST(Stats, MirrorsTheDatasetTableShape) {
  SynthConfig c;
  c.seed = 3;
  const auto g = generate(c);
  const auto s = stats(g);
  EXPECT_EQ(s.users, g.num_nodes(NodeType::kUser));
  EXPECT_EQ(s.tweets, g.num_nodes(NodeType::kTweet));
  EXPECT_EQ(s.keywords, g.num_nodes(NodeType::kKeyword));
  EXPECT_EQ(s.participants + s.benign, s.users);
  EXPECT_EQ(s.cir, cir(g, Label::kBenign, Label::kParticipant));
  const auto j = s.to_json();
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"cir", "class", "edge", "node"}));
  EXPECT_EQ(j["node"].size(), 3u);
  EXPECT_EQ(j["class"].size(), 2u);
  ASSERT_EQ(j["edge"].size(), 6u);
  for (auto r : all_relations()) EXPECT_EQ(j["edge"][std::string(to_string(r))], g.num_edges(r));
  // Every tweet has exactly one poster, as in the reference statistics.
  EXPECT_EQ(s.edges[static_cast<std::size_t>(Relation::kR2)], s.tweets);
}

TEST(Stats, EmptyGraphIsAllZero) {
  const auto s = stats(build_graph({}, {}, {}));
  EXPECT_EQ(s.users + s.tweets + s.keywords + s.participants + s.benign, 0u);
  for (auto e : s.edges) EXPECT_EQ(e, 0u);
  EXPECT_EQ(s.cir, 0.0);
}

TEST(SynthConfig, ValidationAndJson) {
  SynthConfig c;
  EXPECT_NO_THROW(c.validate());
  auto bad = c;
  bad.minority_fraction = 0.0;
  EXPECT_THROW(bad.validate(), GraphError);
  bad = c;
  bad.minority_fraction = 1.0;
  EXPECT_THROW(bad.validate(), GraphError);
  bad = c;
  bad.drug_terms.clear();
  EXPECT_THROW(bad.validate(), GraphError);
  bad = c;
  bad.neutral_terms.clear();
  EXPECT_THROW(generate(bad), GraphError);
  bad = c;
  bad.follows_per_user = -1;
  EXPECT_THROW(bad.validate(), GraphError);
  bad = c;
  bad.homophily = 1.5;
  EXPECT_THROW(bad.validate(), GraphError);

  c.n_users = 321;
  c.homophily = 0.25;
  c.seed = 17;
  const auto back = SynthConfig::from_json(c.to_json());
  EXPECT_EQ(back.to_json(), c.to_json());
  auto j = c.to_json();
  j["n_user"] = 5;
  EXPECT_THROW(SynthConfig::from_json(j), GraphError);
}

}  // namespace
}  // namespace hetgdt::synth
