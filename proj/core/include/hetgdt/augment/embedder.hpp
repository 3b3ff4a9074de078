// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string_view>

#include "hetgdt/encoder.hpp"
#include "hetgdt/hetgraph.hpp"

namespace hetgdt::augment {

/// Maps text to a fixed-length vector. Implementations are deterministic and
/// safe to call concurrently.
class TextEmbedder {
 public:
  virtual ~TextEmbedder() = default;
  virtual Eigen::Index dim() const = 0;
  virtual Eigen::RowVectorXd embed(std::string_view text) const = 0;
};

/// Signed feature hashing of word unigrams and bigrams, L2-normalized.
/// The empty string (or text without tokens) maps to the zero vector.
class HashEmbedder final : public TextEmbedder {
 public:
  explicit HashEmbedder(Eigen::Index dim = 384, std::uint64_t seed = 0x5eedULL);
  Eigen::Index dim() const override { return dim_; }
  Eigen::RowVectorXd embed(std::string_view text) const override;

 private:
  Eigen::Index dim_;
  std::uint64_t seed_;
};

Eigen::RowVectorXd encode_text(const TextEmbedder& embedder, std::string_view text);

/// Embeds every node's text, one matrix per type in index order.
encoder::TypeFeatures embed_graph(const HeteroGraph& g, const TextEmbedder& embedder);

}  // namespace hetgdt::augment
