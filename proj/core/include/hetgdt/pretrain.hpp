// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <vector>

#include "hetgdt/encoder.hpp"
#include "hetgdt/hetgraph.hpp"

namespace hetgdt::pretrain {

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(int epoch, double loss);
  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

enum class LossForm {
  kLogSoftmax,  // -mean_i log softmax_j(delta_ij / tau)[i]
  kRatio,       // -mean_i softmax_j(delta_ij / tau)[i], no log
};

struct PretrainConfig {
  encoder::EncoderConfig encoder;
  double tau = 0.5;
  int epochs = 500;
  double lr = 1e-3;
  double weight_decay = 1e-4;
  std::uint64_t seed = 0;
  LossForm form = LossForm::kLogSoftmax;

  void validate() const;
};

/// Cross-view contrastive loss with cosine similarity between z^mp_i and z^sc_j.
num::Var contrastive_loss(num::Var zmp, num::Var zsc, double tau,
                          LossForm form = LossForm::kLogSoftmax);

struct PretrainResult {
  num::ParamStore params;
  /// Loss of each epoch, evaluated before that epoch's update.
  std::vector<double> loss_trace;
};

using EpochCallback = std::function<void(int epoch, double loss)>;

/// Full-batch Adam on the original graph. Returns the trained encoder.
PretrainResult run_pretrain(const HeteroGraph& g, const encoder::TypeFeatures& features,
                            const PretrainConfig& cfg, const EpochCallback& on_epoch = {});

/// "epoch,loss" rows with round-trip precision.
void write_loss_trace(const std::filesystem::path& path, const std::vector<double>& trace);
std::vector<double> read_loss_trace(const std::filesystem::path& path);

}  // namespace hetgdt::pretrain
