#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "rfhw/majority_blocks.hpp"

namespace {

std::vector<rfhw::VoteVector> make_stream(std::size_t n, std::uint32_t t, std::uint32_t k) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<rfhw::ClassLabel> pick(0, k - 1);
  std::vector<rfhw::VoteVector> s;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<rfhw::ClassLabel> v(t);
    for (auto& x : v) x = pick(rng);
    s.emplace_back(std::move(v), k);
  }
  return s;
}

void BM_RunIterative(benchmark::State& state) {
  const auto t = static_cast<std::uint32_t>(state.range(0));
  const auto stream = make_stream(256, t, 10);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rfhw::run_iterative(stream[i++ % stream.size()]));
  }
}
BENCHMARK(BM_RunIterative)->Arg(8)->Arg(40)->Arg(128)->Arg(512);

void BM_IterativeStream(benchmark::State& state) {
  const auto t = static_cast<std::uint32_t>(state.range(0));
  const auto stream = make_stream(1000, t, 10);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rfhw::run_iterative_stream(stream, rfhw::issue_interval(t)));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(stream.size()));
}
BENCHMARK(BM_IterativeStream)->Arg(40)->Arg(100);

void BM_PipelinedStream(benchmark::State& state) {
  const auto t = static_cast<std::uint32_t>(state.range(0));
  const auto stream = make_stream(1000, t, 10);
  for (auto _ : state) benchmark::DoNotOptimize(rfhw::run_pipelined(stream));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(stream.size()));
}
BENCHMARK(BM_PipelinedStream)->Arg(17)->Arg(40)->Arg(100);

}  // namespace
