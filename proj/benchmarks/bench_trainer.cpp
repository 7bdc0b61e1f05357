#include <benchmark/benchmark.h>

#include <numeric>
#include <random>
#include <vector>

#include "rfhw/trainer.hpp"

namespace {

rfhw::Dataset synthetic(std::size_t n, std::uint32_t p, std::uint32_t k) {
  std::mt19937_64 rng(4);
  rfhw::Dataset d;
  d.num_features = p;
  d.num_classes = k;
  d.features.resize(n * p);
  d.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    d.labels[i] = static_cast<rfhw::ClassLabel>(rng() % k);
    for (std::uint32_t j = 0; j < p; ++j) {
      // Weak class signal in every feature so splits are informative.
      d.features[i * p + j] = static_cast<std::uint8_t>(rng() % 200 + d.labels[i] * 5);
    }
  }
  return d;
}

void BM_BestSplit(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto d = synthetic(n, 64, 10);
  std::vector<std::uint32_t> samples(n);
  std::iota(samples.begin(), samples.end(), 0u);
  std::vector<std::uint16_t> coords(28);
  std::iota(coords.begin(), coords.end(), std::uint16_t{0});
  for (auto _ : state) benchmark::DoNotOptimize(rfhw::best_split(d, samples, coords));
}
BENCHMARK(BM_BestSplit)->Arg(100)->Arg(1000)->Arg(45000);

void BM_TrainTree(benchmark::State& state) {
  const auto d = synthetic(10000, 196, 10);
  rfhw::TrainConfig cfg;
  cfg.max_levels = static_cast<std::uint32_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(rfhw::train_tree(d, cfg, 1));
}
BENCHMARK(BM_TrainTree)->Arg(8)->Arg(14)->Unit(benchmark::kMillisecond);

}  // namespace
