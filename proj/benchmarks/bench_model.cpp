// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <memory>

#include "hetgdt/augment/embedder.hpp"
#include "hetgdt/encoder.hpp"
#include "hetgdt/num/adam.hpp"
#include "hetgdt/pretrain.hpp"
#include "hetgdt/promptkit.hpp"
#include "hetgdt/synthgen.hpp"

namespace {

using namespace hetgdt;

struct Workload {
  HeteroGraph graph;
  encoder::TypeFeatures features;
  encoder::GraphContext ctx;
  encoder::EncoderConfig enc_cfg;
  num::ParamStore enc;
};

/// Synthetic graph with hashed text features, cached per size.
const Workload& workload(std::size_t users) {
  static std::map<std::size_t, std::unique_ptr<Workload>> cache;
  auto& slot = cache[users];
  if (!slot) {
    synth::SynthConfig sc;
    sc.n_users = users;
    sc.seed = 1;
    auto w = std::make_unique<Workload>(Workload{synth::generate(sc), {}, {}, {}, {}});
    w->features = augment::embed_graph(w->graph, augment::HashEmbedder(384, 1));
    w->ctx = encoder::make_context(w->graph);
    w->enc_cfg.in_dims = {384, 384, 384};
    encoder::init_encoder_params(w->enc, w->enc_cfg, 1);
    slot = std::move(w);
  }
  return *slot;
}

void BM_MetapathAdjacency(benchmark::State& state) {
  const auto& w = workload(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state)
    for (auto p : kAllMetaPaths) benchmark::DoNotOptimize(metapath_adjacency(w.graph, p).rows.indices.size());
}
BENCHMARK(BM_MetapathAdjacency)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_MakeContext(benchmark::State& state) {
  const auto& w = workload(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(encoder::make_context(w.graph).metapath_rows.size());
}
BENCHMARK(BM_MakeContext)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_EncoderForward(benchmark::State& state) {
  auto& w = const_cast<Workload&>(workload(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) {
    num::Tape tape;
    num::Binder bind(tape, w.enc, false);
    encoder::TypeVars raw;
    for (std::size_t k = 0; k < kNumNodeTypes; ++k) raw[k] = tape.constant(w.features[k]);
    auto v = encoder::encode(bind, w.enc_cfg, w.ctx, raw, encoder::Mode{});
    benchmark::DoNotOptimize(v.mp.value().data());
  }
}
BENCHMARK(BM_EncoderForward)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_PretrainEpoch(benchmark::State& state) {
  auto& w = const_cast<Workload&>(workload(static_cast<std::size_t>(state.range(0))));
  auto params = w.enc.clone();
  num::OptimizerState opt;
  std::uint64_t epoch = 0;
  for (auto _ : state) {
    num::Tape tape;
    num::Binder bind(tape, params, true);
    encoder::TypeVars raw;
    for (std::size_t k = 0; k < kNumNodeTypes; ++k) raw[k] = tape.constant(w.features[k]);
    auto v = encoder::encode(bind, w.enc_cfg, w.ctx, raw, encoder::Mode{true, 1, epoch++, nullptr});
    auto loss = pretrain::contrastive_loss(v.mp, v.sc, 0.5);
    params.zero_grad();
    tape.backward(loss);
    num::adam_step(params.all(), opt);
  }
}
BENCHMARK(BM_PretrainEpoch)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_PmaPool(benchmark::State& state) {
  const auto& w = workload(2000);
  num::ParamStore ps;
  prompt::init_pma_params(ps, "pma", 256, 1);
  const num::Matrix z = num::Matrix::Random(static_cast<Eigen::Index>(w.graph.num_nodes(NodeType::kUser)), 256);
  const auto seg = w.ctx.metapath_rows[0];
  for (auto _ : state) {
    num::Tape tape;
    num::Binder bind(tape, ps, false);
    benchmark::DoNotOptimize(prompt::pma_pool(bind, "pma", 4, tape.constant(z), seg).value().data());
  }
}
BENCHMARK(BM_PmaPool)->Unit(benchmark::kMillisecond);

void BM_PromptTuneEpoch(benchmark::State& state) {
  const auto& w = workload(static_cast<std::size_t>(state.range(0)));
  const auto split = stratified_split(w.graph, 0.1, 0.1, 1);
  const auto data = prompt::make_tune_data(w.graph, w.features, split);
  prompt::PromptConfig cfg;
  cfg.heads = 4;
  cfg.tokens = 10;
  cfg.epochs = 1;
  for (auto _ : state) benchmark::DoNotOptimize(prompt::run_prompt_tune(w.enc, w.enc_cfg, data, cfg).trace.size());
}
BENCHMARK(BM_PromptTuneEpoch)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace
