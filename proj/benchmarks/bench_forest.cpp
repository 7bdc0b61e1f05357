#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "rfhw/forest_engine.hpp"

namespace {

rfhw::LogicalTree full_tree(std::mt19937_64& rng, std::uint32_t depth, std::uint32_t p) {
  std::vector<rfhw::TreeNode> nodes;
  auto grow = [&](auto&& self, std::uint32_t d) -> std::int32_t {
    const auto idx = static_cast<std::int32_t>(nodes.size());
    nodes.emplace_back();
    if (d == depth) {
      nodes.back().label = static_cast<rfhw::ClassLabel>(rng() % 10);
      return idx;
    }
    rfhw::TreeNode n;
    n.leaf = false;
    n.coord = static_cast<std::uint16_t>(rng() % p);
    n.value = static_cast<std::uint8_t>(rng());
    n.le = self(self, d + 1);
    n.gt = self(self, d + 1);
    nodes[static_cast<std::size_t>(idx)] = n;
    return idx;
  };
  grow(grow, 0);
  return rfhw::LogicalTree(std::move(nodes));
}

rfhw::ForestModel reference_forest(std::uint32_t levels) {
  std::mt19937_64 rng(2);
  rfhw::ForestModel f;
  f.num_classes = 10;
  f.num_features = 784;
  f.levels = levels;
  for (int i = 0; i < 40; ++i) {
    f.trees.push_back(rfhw::build_memory_image(full_tree(rng, levels, 784), levels));
  }
  return f;
}

std::vector<std::vector<std::uint8_t>> inputs(std::size_t n) {
  std::mt19937_64 rng(3);
  std::vector<std::vector<std::uint8_t>> xs(n, std::vector<std::uint8_t>(784));
  for (auto& x : xs)
    for (auto& v : x) v = static_cast<std::uint8_t>(rng());
  return xs;
}

void BM_TreeUnit(benchmark::State& state) {
  const auto levels = static_cast<std::uint32_t>(state.range(0));
  const auto forest = reference_forest(levels);
  const auto xs = inputs(64);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rfhw::run_tree(forest.trees[i % 40], xs[i % xs.size()]));
    ++i;
  }
}
BENCHMARK(BM_TreeUnit)->Arg(8)->Arg(14);

void BM_ClassifyStream(benchmark::State& state) {
  const rfhw::ForestEngine engine(reference_forest(14));
  const auto xs = inputs(200);
  const std::vector<rfhw::FeatureSpan> spans(xs.begin(), xs.end());
  for (auto _ : state) benchmark::DoNotOptimize(engine.classify_stream(spans));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(xs.size()));
}
BENCHMARK(BM_ClassifyStream)->Unit(benchmark::kMillisecond);

}  // namespace
