#include <benchmark/benchmark.h>

#include "symplattice/haar.hpp"
#include "symplattice/lattice.hpp"
#include "symplattice/siegel.hpp"

using namespace symplattice;

namespace {

std::vector<Lattice> lattices(int d, std::size_t count) {
  ChainConfig c;
  c.dim_d = d;
  c.seed = 1;
  ChainSampler s(c, 1);
  return s.draw(count);
}

void BM_Lll(benchmark::State& state) {
  const auto lats = lattices(static_cast<int>(state.range(0)), 64);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(lll_reduce(lats[i++ % lats.size()].basis()));
}
BENCHMARK(BM_Lll)->DenseRange(1, 4);

void BM_ShortestVector(benchmark::State& state) {
  const auto lats = lattices(static_cast<int>(state.range(0)), 64);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(shortest_vector(lats[i++ % lats.size()].basis()));
}
BENCHMARK(BM_ShortestVector)->DenseRange(1, 4);

// one sample's worth of tile counts, N tiles
void BM_TileCounts(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0)), N = static_cast<int>(state.range(1));
  const auto lats = lattices(d, 16);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(tile_counts(lats[i++ % lats.size()].basis(), N, 1.0, 2.0));
}
BENCHMARK(BM_TileCounts)->Args({2, 8})->Args({2, 64})->Args({4, 8})->Args({4, 64})->Unit(benchmark::kMillisecond);

void BM_SiegelReduce(benchmark::State& state) {
  const auto lats = lattices(static_cast<int>(state.range(0)), 64);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(siegel_reduce(lats[i++ % lats.size()].generator()));
}
BENCHMARK(BM_SiegelReduce)->DenseRange(1, 3);

// cost of one thinned chain output (gap steps)
void BM_ChainSample(benchmark::State& state) {
  ChainConfig c;
  c.dim_d = static_cast<int>(state.range(0));
  c.burn_in = 1;
  LatticeChain chain(c, 1);
  for (auto _ : state) benchmark::DoNotOptimize(chain.next());
}
BENCHMARK(BM_ChainSample)->DenseRange(1, 4);

}  // namespace
