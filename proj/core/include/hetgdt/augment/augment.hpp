// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hetgdt/augment/embedder.hpp"
#include "hetgdt/augment/llm.hpp"
#include "hetgdt/augment/prompts.hpp"
#include "hetgdt/augment/text.hpp"
#include "hetgdt/hetgraph.hpp"

namespace hetgdt::augment {

/// One prompt/response pair sent to the model.
struct Exchange {
  std::string task;  // "node", "edge:tweet", "edge:keyword", "edge:user"
  std::string prompt_hash;
  std::string instruction;
  std::string context;
  std::string response;
};

struct GenerationOptions {
  std::string model = "mock";
  int retries = 3;
  int max_tokens = 512;
};

struct GeneratedUser {
  UserText text;
  std::vector<Exchange> exchanges;
};

/// Asks the model for a synthetic variant of `original`. Unparseable replies
/// are retried with a format reminder; after `retries` failures an
/// AugmentError naming `node_id` is raised.
GeneratedUser generate_synthetic_user(LlmClient& client, const UserText& original,
                                      const std::string& node_id,
                                      const GenerationOptions& opts = {});

struct SelectedEdges {
  std::vector<std::size_t> indices;  // 1-based into the candidate list
  std::vector<Exchange> exchanges;
};

/// Asks the model which candidates the synthetic user should connect to.
SelectedEdges select_edges(LlmClient& client, const UserText& original, const UserText& synthetic,
                           NodeType neighbor_type, const std::vector<std::string>& neighbor_texts,
                           const std::string& node_id, const GenerationOptions& opts = {});

struct SyntheticEdge {
  std::string neighbor;
  Relation rel = Relation::kR2;
};

struct AugmentationRecord {
  std::string origin;
  std::string id;  // "syn:<origin>"
  UserText text;
  Eigen::RowVectorXd embedding;
  std::vector<SyntheticEdge> edges;
  std::vector<Exchange> provenance;
};

/// 𝒢 plus synthetic minority users. The base graph is shared, never modified.
struct AugmentedGraph {
  std::shared_ptr<const HeteroGraph> base;
  std::vector<AugmentationRecord> records;  // ascending origin id

  /// Base nodes and edges plus synthetic users (labeled participant) and edges.
  HeteroGraph merged() const;
};

std::string synthetic_id(std::string_view origin);

struct AugmentOptions {
  GenerationOptions generation;
  std::size_t parallelism = 4;
  /// Completed records are written here when augmentation fails, and read
  /// back on the next call so finished origins are not requested again.
  std::optional<std::filesystem::path> partial_path;
};

/// One synthetic user per training-split minority node, connected to the
/// origin's tweet (R2), keyword (R4) and user (R1) neighbours the model selects.
AugmentedGraph augment_graph(std::shared_ptr<const HeteroGraph> g, const SplitAssignment& split,
                             LlmClient& client, const TextEmbedder& embedder,
                             const AugmentOptions& opts = {});

/// JSONL: a header line followed by one line per record.
void write_augmented(const AugmentedGraph& ag, std::ostream& out);
void write_augmented(const AugmentedGraph& ag, const std::filesystem::path& path);
AugmentedGraph read_augmented(std::shared_ptr<const HeteroGraph> base, std::istream& in);
AugmentedGraph read_augmented(std::shared_ptr<const HeteroGraph> base,
                              const std::filesystem::path& path);

}  // namespace hetgdt::augment
