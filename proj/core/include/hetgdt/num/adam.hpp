// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "hetgdt/num/tape.hpp"

namespace hetgdt::num {

struct AdamConfig {
  double lr = 1e-3;
  double weight_decay = 0.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Moments are allocated lazily on the first step, one pair per parameter.
struct OptimizerState {
  AdamConfig config;
  std::vector<Matrix> m;
  std::vector<Matrix> v;
  std::uint64_t step = 0;
};

/// One Adam update over `params` using their `grad` slots. Weight decay is
/// added to the gradient (L2 form). Gradients are left untouched.
void adam_step(const std::vector<Parameter*>& params, OptimizerState& state);

}  // namespace hetgdt::num
