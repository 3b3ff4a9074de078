// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hetgdt/encoder.hpp"
#include "hetgdt/hetgraph.hpp"
#include "hetgdt/metrics.hpp"
#include "hetgdt/promptkit.hpp"

namespace hetgdt::eval {

/// full: every component. A1: no prompts (frozen embeddings, linear head).
/// A2: linear head instead of prototypes. A3: no node prompt. A4: no
/// structure prompt. no-aug: tuned on the original graph. supervised: raw
/// user features through one tanh layer and a linear head, no graph.
enum class Variant { kFull, kA1, kA2, kA3, kA4, kNoAug, kSupervised };

std::span<const Variant> all_variants();
std::string_view to_string(Variant v);
/// Rejects unknown names with std::invalid_argument.
Variant parse_variant(std::string_view name);

/// Prompt configuration of a variant derived from the full configuration.
prompt::PromptConfig variant_config(Variant v, const prompt::PromptConfig& full);

/// Shared state of one seed: both graphs, their features, the split and the
/// frozen encoder. Every variant reads the same inputs.
struct PipelineInputs {
  const HeteroGraph* original = nullptr;
  const HeteroGraph* augmented = nullptr;
  encoder::TypeFeatures original_features;
  encoder::TypeFeatures augmented_features;
  SplitAssignment split;
  const num::ParamStore* encoder = nullptr;
  encoder::EncoderConfig encoder_config;
  prompt::PromptConfig prompt;
  std::uint64_t seed = 0;
};

struct ReportRow {
  std::string variant;
  std::uint64_t seed = 0;
  std::string split;
  Metrics metrics;
  bool operator==(const ReportRow&) const = default;
};

struct AblationOutcome {
  ReportRow test;
  ReportRow val;
  /// Per-epoch validation Macro-F1 and loss.
  std::vector<prompt::EpochRecord> trace;
};

AblationOutcome run_ablation(Variant v, const PipelineInputs& in);

/// Labels of `ids` and the predictions at the matching rows, both as 0/1.
Metrics score_ids(const HeteroGraph& g, const std::vector<std::string>& ids,
                  const std::vector<Label>& predictions);

/// Trains the supervised baseline on the original graph's training split and
/// predicts every user of `g`.
std::vector<Label> run_supervised(const HeteroGraph& g, const encoder::TypeFeatures& features,
                                  const SplitAssignment& split, const encoder::EncoderConfig& enc,
                                  const prompt::PromptConfig& cfg,
                                  std::vector<prompt::EpochRecord>* trace = nullptr);

inline constexpr std::string_view kReportHeader =
    "variant,seed,split,macro_f1,gmean,minority_f1,majority_f1";

void write_report(const std::filesystem::path& path, const std::vector<ReportRow>& rows);
std::vector<ReportRow> read_report(const std::filesystem::path& path);

}  // namespace hetgdt::eval
