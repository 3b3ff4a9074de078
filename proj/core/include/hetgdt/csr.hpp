// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hetgdt {

/// Compressed adjacency lists over a pair of index spaces. Row r lists the
/// column indices adjacent to r in ascending order, without duplicates.
struct Csr {
  std::vector<std::size_t> offsets{0};
  std::vector<std::size_t> indices;

  std::size_t rows() const { return offsets.size() - 1; }
  std::size_t nnz() const { return indices.size(); }
  std::span<const std::size_t> row(std::size_t r) const {
    return {indices.data() + offsets[r], offsets[r + 1] - offsets[r]};
  }
  static Csr from_rows(const std::vector<std::vector<std::size_t>>& rows);
};

}  // namespace hetgdt
