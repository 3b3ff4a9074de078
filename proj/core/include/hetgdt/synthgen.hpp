// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hetgdt/hetgraph.hpp"

namespace hetgdt::synth {

/// Drug keywords grouped after the cannabis, opioid, hallucinogen, stimulant
/// and depressant categories. Every entry is recognized by augment::is_drug_term.
const std::vector<std::string>& default_drug_terms();
/// Everyday topic words with no drug connotation.
const std::vector<std::string>& default_neutral_terms();

struct SynthConfig {
  std::size_t n_users = 200;
  double minority_fraction = 0.119;
  int tweets_min = 2;
  int tweets_max = 5;
  std::vector<std::string> drug_terms = default_drug_terms();
  std::vector<std::string> neutral_terms = default_neutral_terms();
  /// Participant-participant R1/R3 acceptance is scaled by 1 + homophily * kappa.
  double homophily = 0.8;
  double kappa = 4.0;
  /// Probability that a benign profile or tweet mentions a drug keyword.
  double contamination = 0.05;
  /// Probability that a participant tweet is drug-related (else everyday chatter).
  double participant_signal = 0.6;
  /// Probability that a participant profile carries a promotional phrase.
  double promo_rate = 0.5;
  // Per-relation density knobs: expected edges per user (R1, R3, R4) and the
  // chance that an everyday tweet names a keyword (R5) or tags one (R6).
  // R2 is fixed by tweets_min..tweets_max.
  double follows_per_user = 4.0;
  double engagements_per_user = 1.5;
  double profile_keywords = 2.0;
  double tweet_keyword_rate = 0.4;
  double tweet_hashtag_rate = 0.25;
  std::uint64_t seed = 0;

  void validate() const;
  nlohmann::json to_json() const;
  static SynthConfig from_json(const nlohmann::json& j);
};

/// Node id of the i-th generated user, e.g. "u0042".
std::string user_id(std::size_t i, std::size_t n_users);

/// Deterministic graph with labels on every user.
HeteroGraph generate(const SynthConfig& cfg);

/// Table-4-shaped summary.
struct GraphStats {
  std::size_t users = 0;
  std::size_t tweets = 0;
  std::size_t keywords = 0;
  std::size_t participants = 0;
  std::size_t benign = 0;
  std::array<std::size_t, kNumRelations> edges{};
  /// benign / participant; 0 when either class is empty.
  double cir = 0.0;

  nlohmann::json to_json() const;
};

GraphStats stats(const HeteroGraph& g);

/// Writes `<dir>/graph.jsonl`, `<dir>/labels.csv` and `<dir>/stats.json`.
void write_synthetic(const HeteroGraph& g, const std::filesystem::path& dir);

}  // namespace hetgdt::synth
