#include "rfhw/trainer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

#include "parallel.hpp"

namespace rfhw {

std::uint32_t TrainConfig::split_features(std::uint32_t num_features) const {
  if (features_per_split != 0) return features_per_split;
  std::uint32_t m = 1;
  while (std::uint64_t{m} * m < num_features) ++m;
  return m;
}

void TrainConfig::validate(std::uint32_t num_features) const {
  if (num_trees < 2) {
    throw std::invalid_argument("forest needs at least 2 trees, got " +
                                std::to_string(num_trees));
  }
  if (max_levels < 1 || max_levels > 24) {
    throw std::invalid_argument("levels must be in [1, 24], got " +
                                std::to_string(max_levels));
  }
  if (!(bagging_fraction > 0.0 && bagging_fraction <= 1.0)) {
    throw std::invalid_argument("bagging fraction must be in (0, 1]");
  }
  const std::uint32_t m = split_features(num_features);
  if (m < 1 || m > num_features) {
    throw std::invalid_argument("features per split must be in [1, p = " +
                                std::to_string(num_features) + "], got " +
                                std::to_string(m));
  }
  if (min_samples_leaf < 1) throw std::invalid_argument("min samples per leaf must be >= 1");
}

double gini(std::span<const std::uint64_t> hist) {
  std::uint64_t n = 0;
  for (auto c : hist) n += c;
  if (n == 0) throw std::invalid_argument("gini: empty histogram");
  double sum_sq = 0.0;
  for (auto c : hist) {
    const double f = static_cast<double>(c) / static_cast<double>(n);
    sum_sq += f * f;
  }
  return 1.0 - sum_sq;
}

ClassLabel majority_label(std::span<const std::uint64_t> hist) {
  ClassLabel best = 0;
  for (ClassLabel j = 1; j < hist.size(); ++j) {
    if (hist[j] >= hist[best]) best = j;
  }
  return best;
}

namespace {

__extension__ typedef __int128 Wide;

// Split quality q = S_l / n_l + S_r / n_r with S = sum of squared class
// counts; weighted Gini is 1 - q / n, so larger q is better.
struct Score {
  std::uint64_t s_left = 0, n_left = 0, s_right = 0, n_right = 0;

  Wide numerator() const {
    return Wide(s_left) * Wide(n_right) + Wide(s_right) * Wide(n_left);
  }
  Wide denominator() const { return Wide(n_left) * Wide(n_right); }
  bool better_than(const Score& o) const {
    return numerator() * o.denominator() > o.numerator() * denominator();
  }
};

struct Sweep {
  std::vector<std::uint64_t> left;
  std::vector<std::uint64_t> right;
  std::uint64_t s_left = 0, s_right = 0, n_left = 0, n_right = 0;

  Sweep(std::span<const std::uint64_t> parent, std::uint64_t n)
      : left(parent.size(), 0), right(parent.begin(), parent.end()), n_right(n) {
    for (auto c : parent) s_right += c * c;
  }

  // Moves `m` samples of class j from the right side to the left side.
  void move(std::size_t j, std::uint64_t m) {
    s_left += 2 * left[j] * m + m * m;
    s_right -= 2 * right[j] * m - m * m;
    left[j] += m;
    right[j] -= m;
    n_left += m;
    n_right -= m;
  }
  Score score() const { return {s_left, n_left, s_right, n_right}; }
};

}  // namespace

std::optional<SplitCandidate> best_split(const Dataset& data,
                                         std::span<const std::uint32_t> samples,
                                         std::span<const std::uint16_t> candidate_coords,
                                         std::uint32_t min_samples_leaf) {
  if (samples.empty()) return std::nullopt;
  const std::size_t k = data.num_classes;
  const std::uint64_t n = samples.size();
  const std::uint64_t min_leaf = std::max<std::uint32_t>(1, min_samples_leaf);
  if (n < 2 * min_leaf) return std::nullopt;

  std::vector<std::uint64_t> parent(k, 0);
  for (auto s : samples) ++parent[data.labels[s]];
  std::uint64_t s_parent = 0;
  for (auto c : parent) s_parent += c * c;
  // Parent quality S_p / n expressed as a score with an empty right side.
  const Score parent_score{s_parent, n, 0, 1};

  std::vector<std::uint16_t> coords(candidate_coords.begin(), candidate_coords.end());
  std::sort(coords.begin(), coords.end());
  coords.erase(std::unique(coords.begin(), coords.end()), coords.end());

  std::optional<SplitCandidate> best;
  Score best_score = parent_score;

  const bool use_histogram = n >= 256;
  std::vector<std::uint64_t> hist;
  std::array<std::uint64_t, 256> bucket{};
  std::vector<std::pair<std::uint8_t, ClassLabel>> pairs;

  auto consider = [&](std::uint16_t coord, std::uint8_t value, const Sweep& sw) {
    if (sw.n_left < min_leaf || sw.n_right < min_leaf) return;
    const Score sc = sw.score();
    if (!sc.better_than(best_score)) return;
    best_score = sc;
    SplitCandidate c;
    c.coord = coord;
    c.value = value;
    c.left = sw.n_left;
    c.right = sw.n_right;
    const double q = static_cast<double>(sw.s_left) / static_cast<double>(sw.n_left) +
                     static_cast<double>(sw.s_right) / static_cast<double>(sw.n_right);
    c.weighted_impurity = 1.0 - q / static_cast<double>(n);
    best = c;
  };

  for (std::uint16_t coord : coords) {
    if (coord >= data.num_features) {
      throw std::invalid_argument("best_split: coordinate " + std::to_string(coord) +
                                  " outside p = " + std::to_string(data.num_features));
    }
    Sweep sw(parent, n);
    if (use_histogram) {
      hist.assign(256 * k, 0);
      bucket.fill(0);
      for (auto s : samples) {
        const std::uint8_t v = data.features[std::size_t{s} * data.num_features + coord];
        ++hist[std::size_t{v} * k + data.labels[s]];
        ++bucket[v];
      }
      for (std::size_t v = 0; v < 256; ++v) {
        if (bucket[v] == 0) continue;
        for (std::size_t j = 0; j < k; ++j) {
          if (const auto m = hist[v * k + j]) sw.move(j, m);
        }
        if (sw.n_right == 0) break;
        consider(coord, static_cast<std::uint8_t>(v), sw);
      }
    } else {
      pairs.clear();
      for (auto s : samples) {
        pairs.emplace_back(data.features[std::size_t{s} * data.num_features + coord],
                           data.labels[s]);
      }
      std::sort(pairs.begin(), pairs.end());
      for (std::size_t i = 0; i < pairs.size();) {
        const std::uint8_t v = pairs[i].first;
        for (; i < pairs.size() && pairs[i].first == v; ++i) sw.move(pairs[i].second, 1);
        if (sw.n_right == 0) break;
        consider(coord, v, sw);
      }
    }
  }
  return best;
}

namespace {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    stream};
  return std::mt19937_64(seq);
}

constexpr std::uint32_t kBagStream = 0xBA6;
constexpr std::uint32_t kSplitStream = 0x5B1;

}  // namespace

std::uint64_t tree_seed(std::uint64_t forest_seed, std::uint32_t tree_index) {
  return splitmix64(forest_seed ^ splitmix64(tree_index + 1));
}

std::vector<std::uint32_t> bag_samples(std::size_t n, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("bag_samples: fraction must be in (0, 1]");
  }
  const auto take = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n))));
  std::vector<std::uint32_t> all(n);
  std::iota(all.begin(), all.end(), 0u);
  if (take >= n) return all;
  std::vector<std::uint32_t> picked;
  picked.reserve(take);
  auto rng = make_rng(seed, kBagStream);
  std::sample(all.begin(), all.end(), std::back_inserter(picked), take, rng);
  return picked;
}

LogicalTree train_tree(const Dataset& data, std::span<const std::uint32_t> samples,
                       const TrainConfig& config, std::uint64_t seed) {
  if (samples.empty()) throw std::invalid_argument("train_tree: no samples");
  const std::uint32_t m = config.split_features(data.num_features);
  if (m < 1 || m > data.num_features) {
    throw std::invalid_argument("train_tree: features per split out of range");
  }
  auto rng = make_rng(seed, kSplitStream);
  std::vector<std::uint16_t> perm(data.num_features);
  std::iota(perm.begin(), perm.end(), std::uint16_t{0});

  std::vector<std::uint32_t> idx(samples.begin(), samples.end());
  std::vector<TreeNode> nodes;

  struct Work {
    std::size_t begin, end;
    std::uint32_t depth;
    std::int32_t node;
  };
  nodes.emplace_back();
  std::vector<Work> stack{{0, idx.size(), 0, 0}};
  std::vector<std::uint64_t> hist(data.num_classes);

  while (!stack.empty()) {
    const Work w = stack.back();
    stack.pop_back();
    const std::span<const std::uint32_t> here(idx.data() + w.begin, w.end - w.begin);

    std::fill(hist.begin(), hist.end(), 0);
    for (auto s : here) ++hist[data.labels[s]];
    const bool pure =
        std::count_if(hist.begin(), hist.end(), [](auto c) { return c != 0; }) <= 1;

    std::optional<SplitCandidate> split;
    if (!pure && w.depth < config.max_levels) {
      // Partial Fisher-Yates: the first m entries of perm become the draw.
      for (std::uint32_t i = 0; i < m; ++i) {
        std::uniform_int_distribution<std::uint32_t> pick(i, data.num_features - 1);
        std::swap(perm[i], perm[pick(rng)]);
      }
      split = best_split(data, here, std::span(perm.data(), m), config.min_samples_leaf);
    }

    TreeNode& nd = nodes[static_cast<std::size_t>(w.node)];
    if (!split) {
      nd.leaf = true;
      nd.label = majority_label(hist);
      continue;
    }
    const auto mid = std::partition(
        idx.begin() + static_cast<std::ptrdiff_t>(w.begin),
        idx.begin() + static_cast<std::ptrdiff_t>(w.end), [&](std::uint32_t s) {
          return data.features[std::size_t{s} * data.num_features + split->coord] <=
                 split->value;
        });
    const auto split_at = static_cast<std::size_t>(mid - idx.begin());

    nd.leaf = false;
    nd.coord = split->coord;
    nd.value = split->value;
    const auto le = static_cast<std::int32_t>(nodes.size());
    const auto gt = le + 1;
    nd.le = le;
    nd.gt = gt;
    nodes.emplace_back();
    nodes.emplace_back();
    // gt first so the le subtree is expanded next (depth-first, le before gt).
    stack.push_back({split_at, w.end, w.depth + 1, gt});
    stack.push_back({w.begin, split_at, w.depth + 1, le});
  }
  return LogicalTree(std::move(nodes));
}

LogicalTree train_tree(const Dataset& data, const TrainConfig& config, std::uint64_t seed) {
  std::vector<std::uint32_t> all(data.size());
  std::iota(all.begin(), all.end(), 0u);
  return train_tree(data, all, config, seed);
}

std::vector<LogicalTree> train_logical_forest(const Dataset& data,
                                              const TrainConfig& config) {
  data.validate();
  if (data.empty()) throw std::invalid_argument("train_forest: empty dataset");
  config.validate(data.num_features);
  std::vector<LogicalTree> trees(config.num_trees);
  detail::parallel_for(config.num_trees, config.workers, [&](std::size_t t) {
    const std::uint64_t s = tree_seed(config.seed, static_cast<std::uint32_t>(t));
    const auto bag = bag_samples(data.size(), config.bagging_fraction, s);
    trees[t] = train_tree(data, bag, config, s);
  });
  return trees;
}

ForestModel train_forest(const Dataset& data, const TrainConfig& config) {
  if (data.num_classes > 256) {
    throw std::invalid_argument("tree leaves hold 8-bit labels; K must be <= 256");
  }
  const auto trees = train_logical_forest(data, config);
  ForestModel model;
  model.num_classes = data.num_classes;
  model.num_features = data.num_features;
  model.levels = config.max_levels;
  model.trees.reserve(trees.size());
  for (const auto& t : trees) model.trees.push_back(build_memory_image(t, config.max_levels));
  std::ostringstream meta;
  meta << "trees=" << config.num_trees << " levels=" << config.max_levels
       << " bagging=" << config.bagging_fraction
       << " features_per_split=" << config.split_features(data.num_features)
       << " seed=" << config.seed << " min_samples_leaf=" << config.min_samples_leaf
       << " samples=" << data.size();
  model.metadata = meta.str();
  return model;
}

}  // namespace rfhw
