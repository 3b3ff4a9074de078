// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetgdt/num/init.hpp"

#include <cmath>
#include <random>
#include <string>

namespace hetgdt::num {

InitScheme parse_init_scheme(std::string_view name) {
  if (name == "xavier-uniform") return InitScheme::kXavierUniform;
  if (name == "zeros") return InitScheme::kZeros;
  throw NumError("unknown init scheme '" + std::string(name) + "'");
}

Matrix init_params(Eigen::Index rows, Eigen::Index cols, InitScheme scheme, std::uint64_t seed) {
  if (rows <= 0 || cols <= 0)
    throw NumError("init_params: dims must be positive, got " + std::to_string(rows) + "x" +
                   std::to_string(cols));
  if (scheme == InitScheme::kZeros) return Matrix::Zero(rows, cols);
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-bound, bound);
  Matrix out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = dist(rng);
  return out;
}

}  // namespace hetgdt::num
