// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "hetgdt/cli/config.hpp"

namespace hetgdt::cli {

/// Artifact locations under the output directory.
struct Layout {
  std::filesystem::path root;

  std::filesystem::path graph() const { return root / "graph" / "graph.jsonl"; }
  std::filesystem::path labels() const { return root / "graph" / "labels.csv"; }
  std::filesystem::path stats() const { return root / "graph" / "stats.json"; }
  std::filesystem::path split() const { return root / "graph" / "split.json"; }
  std::filesystem::path encoder() const { return root / "pretrain" / "encoder"; }
  std::filesystem::path pretrain_trace() const { return root / "pretrain" / "loss_trace.csv"; }
  std::filesystem::path augmented() const { return root / "augment" / "augmented.jsonl"; }
  std::filesystem::path cache() const { return root / "augment" / "cache.jsonl"; }
  std::filesystem::path partial() const { return root / "augment" / "partial.jsonl"; }
  std::filesystem::path prompt() const { return root / "tune" / "prompt"; }
  std::filesystem::path tune_trace() const { return root / "tune" / "trace.csv"; }
  std::filesystem::path report() const { return root / "eval" / "report.csv"; }
  std::filesystem::path manifest(std::string_view stage) const;
  void create_dirs() const;
};

/// Per-stage record: configuration hash, seed, and SHA-256 of every input and
/// output file (paths relative to the output directory).
struct Manifest {
  std::string stage;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> inputs;
  std::map<std::string, std::string> outputs;

  nlohmann::json to_json() const;
  static Manifest from_json(const nlohmann::json& j);
};

void write_manifest(const Layout& layout, const Manifest& m);
Manifest read_manifest(const Layout& layout, std::string_view stage);

/// Reads the upstream manifest and checks that its outputs are unchanged on
/// disk. Missing manifest: ordering error. Changed file: stale-input refusal.
Manifest require_stage(const Layout& layout, std::string_view upstream, std::string_view consumer);

// Stage commands. Each returns an exit code and reports failures on stderr.
int cmd_synth(const RunConfig& c);
int cmd_pretrain(const RunConfig& c);
int cmd_augment(const RunConfig& c);
int cmd_tune(const RunConfig& c);
int cmd_eval(const RunConfig& c);
int cmd_pipeline(const RunConfig& c);

/// Runs `body`, mapping ValidationError to 2 and other exceptions to 3.
int guarded(std::string_view stage, const std::function<void()>& body);

}  // namespace hetgdt::cli
