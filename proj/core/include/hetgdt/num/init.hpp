// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string_view>

#include "hetgdt/num/tape.hpp"

namespace hetgdt::num {

enum class InitScheme { kXavierUniform, kZeros };

InitScheme parse_init_scheme(std::string_view name);

/// rows x cols tensor. Xavier draws from U(-b, b), b = sqrt(6 / (rows + cols)).
Matrix init_params(Eigen::Index rows, Eigen::Index cols, InitScheme scheme, std::uint64_t seed);

}  // namespace hetgdt::num
