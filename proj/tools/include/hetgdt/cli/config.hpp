// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hetgdt/augment/llm.hpp"
#include "hetgdt/encoder.hpp"
#include "hetgdt/pretrain.hpp"
#include "hetgdt/promptkit.hpp"
#include "hetgdt/synthgen.hpp"

namespace hetgdt::cli {

/// Bad configuration, stage ordering or stale inputs (exit code 2).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitRuntime = 3;

struct LlmSettings {
  bool mock = false;
  std::string endpoint;
  std::string model;
  std::string api_key_env = "LLM_API_KEY";
  int max_attempts = 4;
  int timeout_s = 60;
  int retries = 3;
  std::size_t parallelism = 4;
};

struct RunConfig {
  std::uint64_t seed = 0;
  /// Training fraction per class; validation takes val_fraction, test the rest.
  double split = 0.1;
  double val_fraction = 0.1;
  std::filesystem::path out = "run";
  /// Existing graph JSONL to use instead of generating one.
  std::optional<std::filesystem::path> graph;

  synth::SynthConfig synth;
  encoder::EncoderConfig encoder;
  pretrain::PretrainConfig pretrain;
  prompt::PromptConfig prompt;
  LlmSettings llm;
  Eigen::Index embed_dim = 384;
  std::vector<std::string> variants = {"full"};

  void validate() const;
  nlohmann::json to_json() const;
};

/// Hyper-parameters of the 10%, 20% and 40% training splits; other
/// fractions use the 10% row.
RunConfig defaults_for_split(double split);

/// Command-line values that take precedence over the config file.
struct Overrides {
  std::optional<std::filesystem::path> config;
  std::optional<std::uint64_t> seed;
  std::optional<double> split;
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> graph;
  bool mock_llm = false;
  std::optional<std::string> llm_endpoint;
  std::optional<std::string> llm_model;
};

/// Table defaults for the split, then the file, then the flags. Unknown keys
/// anywhere in the file are rejected.
RunConfig resolve_config(const Overrides& o);
RunConfig config_from_json(const nlohmann::json& j, std::optional<double> split_override = {});

/// Per-stage seeds derived from the root seed by stage name.
std::uint64_t stage_seed(const RunConfig& c, std::string_view stage);

/// Hash of the configuration sections a stage depends on.
std::string stage_config_hash(const RunConfig& c, std::string_view stage);

}  // namespace hetgdt::cli
