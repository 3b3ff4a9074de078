// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetgdt/num/adam.hpp"

#include <cmath>

namespace hetgdt::num {

void adam_step(const std::vector<Parameter*>& params, OptimizerState& state) {
  if (state.m.empty() && state.v.empty()) {
    for (const auto* p : params) {
      state.m.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
      state.v.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
    }
  }
  if (state.m.size() != params.size() || state.v.size() != params.size())
    throw NumError("adam_step: optimizer state tracks " + std::to_string(state.m.size()) +
                   " parameters, got " + std::to_string(params.size()));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& p = *params[i];
    if (p.grad.rows() != p.value.rows() || p.grad.cols() != p.value.cols() ||
        state.m[i].rows() != p.value.rows() || state.m[i].cols() != p.value.cols())
      throw NumError("adam_step: shape mismatch for '" + p.name + "'");
  }

  const auto& c = state.config;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(c.beta1, t);
  const double bc2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = *params[i];
    Matrix g = p.grad;
    if (c.weight_decay != 0.0) g += c.weight_decay * p.value;
    state.m[i] = c.beta1 * state.m[i] + (1.0 - c.beta1) * g;
    state.v[i] = c.beta2 * state.v[i] + (1.0 - c.beta2) * g.cwiseAbs2();
    p.value.array() -= c.lr * (state.m[i].array() / bc1) /
                       ((state.v[i].array() / bc2).sqrt() + c.eps);
  }
}

}  // namespace hetgdt::num
