// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <random>

#include "hetgdt/csr.hpp"
#include "hetgdt/num/binder.hpp"
#include "hetgdt/num/ops.hpp"
#include "hetgdt/num/tape.hpp"

namespace {

using hetgdt::Csr;
using hetgdt::num::Matrix;

Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

/// Rows of `n` with `degree` random members each.
std::vector<std::vector<std::size_t>> random_rows(std::size_t n, std::size_t degree, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<std::vector<std::size_t>> rows(n);
  for (auto& r : rows)
    for (std::size_t k = 0; k < degree; ++k) r.push_back(pick(rng));
  return rows;
}

void BM_Spmm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto d = state.range(1);
  std::vector<Eigen::Triplet<double>> trip;
  const auto rows = random_rows(n, 16, 1);
  for (std::size_t i = 0; i < n; ++i)
    for (auto j : rows[i]) trip.emplace_back(static_cast<int>(i), static_cast<int>(j), 1.0 / 16.0);
  auto s = std::make_shared<hetgdt::num::SparseMatrix>(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  s->setFromTriplets(trip.begin(), trip.end());
  const Matrix x = random_matrix(static_cast<Eigen::Index>(n), d, 2);
  for (auto _ : state) {
    hetgdt::num::Tape tape;
    auto out = hetgdt::num::spmm(s, tape.constant(x));
    benchmark::DoNotOptimize(out.value().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s->nonZeros()) * d);
}
BENCHMARK(BM_Spmm)->Args({2000, 64})->Args({2000, 256})->Args({10000, 256});

void BM_MatmulForwardBackward(benchmark::State& state) {
  const auto n = state.range(0), d = state.range(1);
  const Matrix x = random_matrix(n, d, 3);
  hetgdt::num::ParamStore ps;
  ps.add("W", random_matrix(d, d, 4));
  for (auto _ : state) {
    hetgdt::num::Tape tape;
    hetgdt::num::Binder b(tape, ps, true);
    ps.zero_grad();
    tape.backward(hetgdt::num::sum_all(hetgdt::num::tanh(hetgdt::num::matmul(tape.constant(x), b("W")))));
    benchmark::DoNotOptimize(ps.at("W").grad.data());
  }
}
BENCHMARK(BM_MatmulForwardBackward)->Args({2000, 64})->Args({2000, 256});

void BM_SegmentAttention(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto degree = static_cast<std::size_t>(state.range(1));
  const Eigen::Index d = 256, heads = 4;
  auto segments = std::make_shared<const Csr>(Csr::from_rows(random_rows(n, degree, 5)));
  const Matrix owner = random_matrix(static_cast<Eigen::Index>(n), heads, 6);
  const Matrix elem = random_matrix(static_cast<Eigen::Index>(n), heads, 7);
  const Matrix values = random_matrix(static_cast<Eigen::Index>(n), d, 8);
  for (auto _ : state) {
    hetgdt::num::Tape tape;
    auto out = hetgdt::num::segment_attention(segments, tape.constant(owner), tape.constant(elem),
                                              tape.constant(values), hetgdt::num::ScoreActivation::kTanh);
    benchmark::DoNotOptimize(out.value().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(segments->indices.size()));
}
BENCHMARK(BM_SegmentAttention)->Args({2000, 8})->Args({2000, 32});

void BM_LayerNormRows(benchmark::State& state) {
  const auto n = state.range(0), d = state.range(1);
  const Matrix x = random_matrix(n, d, 9);
  const Matrix g = Matrix::Ones(1, d), b = Matrix::Zero(1, d);
  for (auto _ : state) {
    hetgdt::num::Tape tape;
    auto out = hetgdt::num::layer_norm_rows(tape.constant(x), tape.constant(g), tape.constant(b));
    benchmark::DoNotOptimize(out.value().data());
  }
}
BENCHMARK(BM_LayerNormRows)->Args({2000, 256});

}  // namespace
