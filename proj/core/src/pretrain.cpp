// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetgdt/pretrain.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hetgdt/num/adam.hpp"

namespace hetgdt::pretrain {

DivergenceError::DivergenceError(int epoch, double loss)
    : std::runtime_error("pretraining diverged at epoch " + std::to_string(epoch) +
                         " (loss " + std::to_string(loss) + ")"),
      epoch_(epoch) {}

void PretrainConfig::validate() const {
  encoder.validate();
  if (!(tau > 0.0)) throw num::NumError("pretrain: tau must be > 0");
  if (epochs < 0) throw num::NumError("pretrain: epochs must be >= 0");
  if (!(lr > 0.0)) throw num::NumError("pretrain: learning rate must be > 0");
  if (weight_decay < 0.0) throw num::NumError("pretrain: weight decay must be >= 0");
}

num::Var contrastive_loss(num::Var zmp, num::Var zsc, double tau, LossForm form) {
  if (!(tau > 0.0)) throw num::NumError("contrastive_loss: tau must be > 0");
  if (zmp.rows() < 1 || zmp.rows() != zsc.rows() || zmp.cols() != zsc.cols())
    throw num::NumError("contrastive_loss: views must both be N x d with N >= 1");
  const auto n = zmp.rows();
  num::Var logits = num::scale(num::cosine_similarity(zmp, zsc), 1.0 / tau);
  if (form == LossForm::kLogSoftmax) {
    std::vector<int> targets(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) targets[static_cast<std::size_t>(i)] = static_cast<int>(i);
    return num::cross_entropy(logits, std::move(targets));
  }
  auto& tape = zmp.tape();
  num::Var diag = num::hadamard(num::softmax_rows(logits),
                                tape.constant(num::Matrix::Identity(n, n)));
  return num::scale(num::sum_all(diag), -1.0 / static_cast<double>(n));
}

PretrainResult run_pretrain(const HeteroGraph& g, const encoder::TypeFeatures& features,
                            const PretrainConfig& cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  PretrainResult out;
  encoder::init_encoder_params(out.params, cfg.encoder, cfg.seed);
  const auto ctx = encoder::make_context(g);
  for (auto t : kAllNodeTypes) {
    const auto k = static_cast<std::size_t>(t);
    if (static_cast<std::size_t>(features[k].rows()) != g.num_nodes(t))
      throw num::NumError("run_pretrain: feature rows for " + std::string(to_string(t)) +
                          " do not match the graph");
  }
  num::OptimizerState opt;
  opt.config.lr = cfg.lr;
  opt.config.weight_decay = cfg.weight_decay;
  const auto trainable = out.params.all();
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    num::Tape tape;
    num::Binder bind(tape, out.params, true);
    encoder::TypeVars raw;
    for (std::size_t k = 0; k < kNumNodeTypes; ++k) raw[k] = tape.constant(features[k]);
    encoder::Mode mode{true, cfg.seed, static_cast<std::uint64_t>(epoch), nullptr};
    auto views = encoder::encode(bind, cfg.encoder, ctx, raw, mode);
    auto loss = contrastive_loss(views.mp, views.sc, cfg.tau, cfg.form);
    const double value = loss.scalar();
    if (!std::isfinite(value)) throw DivergenceError(epoch, value);
    out.loss_trace.push_back(value);
    if (on_epoch) on_epoch(epoch, value);
    out.params.zero_grad();
    tape.backward(loss);
    num::adam_step(trainable, opt);
  }
  return out;
}

void write_loss_trace(const std::filesystem::path& path, const std::vector<double>& trace) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << "epoch,loss\n";
  char buf[64];
  for (std::size_t i = 0; i < trace.size(); ++i) {
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), trace[i]);
    (void)ec;
    f << i << ',' << std::string_view(buf, static_cast<std::size_t>(end - buf)) << '\n';
  }
}

std::vector<double> read_loss_trace(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  std::getline(f, line);
  if (line != "epoch,loss") throw std::runtime_error("bad loss trace header in " + path.string());
  std::vector<double> out;
  while (std::getline(f, line)) {
    auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error("bad loss trace row: " + line);
    out.push_back(std::stod(line.substr(comma + 1)));
  }
  return out;
}

}  // namespace hetgdt::pretrain
