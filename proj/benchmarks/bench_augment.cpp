// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "hetgdt/augment/augment.hpp"
#include "hetgdt/augment/embedder.hpp"
#include "hetgdt/augment/llm.hpp"
#include "hetgdt/synthgen.hpp"

namespace {

using namespace hetgdt;

void BM_HashEmbedder(benchmark::State& state) {
  const augment::HashEmbedder emb(384, 1);
  const std::string text =
      "Username: someone; User ID: @someone; User Profile: coffee, hiking and weekend road trips. "
      "Sharing photos from the mountains #travel #outdoors";
  for (auto _ : state) benchmark::DoNotOptimize(augment::encode_text(emb, text).data());
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_HashEmbedder);

void BM_MockAugmentGraph(benchmark::State& state) {
  synth::SynthConfig sc;
  sc.n_users = static_cast<std::size_t>(state.range(0));
  sc.seed = 1;
  auto g = std::make_shared<const HeteroGraph>(synth::generate(sc));
  const auto split = stratified_split(*g, 0.1, 0.1, 1);
  const augment::HashEmbedder emb(384, 1);
  augment::AugmentOptions opts;
  opts.parallelism = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) {
    augment::MockLlmClient mock;
    benchmark::DoNotOptimize(augment::augment_graph(g, split, mock, emb, opts).records.size());
  }
}
BENCHMARK(BM_MockAugmentGraph)->Args({2000, 1})->Args({2000, 4})->Unit(benchmark::kMillisecond);

}  // namespace
