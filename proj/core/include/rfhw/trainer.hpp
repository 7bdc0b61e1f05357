#pragma once

// CART random-forest training. Each tree sees a bagged subsample drawn
// without replacement, and every split considers a fresh random subset of
// the coordinates.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rfhw/dataset.hpp"
#include "rfhw/forest_engine.hpp"
#include "rfhw/logical_tree.hpp"

namespace rfhw {

struct TrainConfig {
  std::uint32_t num_trees = 40;
  std::uint32_t max_levels = 14;
  double bagging_fraction = 0.75;
  std::uint32_t features_per_split = 0;  // 0 selects ceil(sqrt(p))
  std::uint64_t seed = 1;
  std::uint32_t min_samples_leaf = 1;
  unsigned workers = 1;

  std::uint32_t split_features(std::uint32_t num_features) const;
  // Throws std::invalid_argument for an unusable configuration.
  void validate(std::uint32_t num_features) const;
};

// 1 - sum (n_j / n)^2. Throws std::invalid_argument on an all-zero histogram.
double gini(std::span<const std::uint64_t> class_histogram);

// Majority label of a histogram; ties go to the highest class index.
ClassLabel majority_label(std::span<const std::uint64_t> class_histogram);

struct SplitCandidate {
  std::uint16_t coord = 0;
  std::uint8_t value = 0;            // samples with x[coord] <= value go left
  std::uint64_t left = 0;
  std::uint64_t right = 0;
  double weighted_impurity = 0.0;    // (n_l g_l + n_r g_r) / n

  friend bool operator==(const SplitCandidate&, const SplitCandidate&) = default;
};

// Best axis-parallel split over the candidate coordinates, with thresholds
// taken from the observed values. Scores are compared exactly; ties go to the
// lowest coordinate, then the lowest threshold. Returns nullopt when no split
// strictly lowers the weighted Gini impurity or none leaves at least
// `min_samples_leaf` samples on each side.
std::optional<SplitCandidate> best_split(const Dataset& data,
                                         std::span<const std::uint32_t> samples,
                                         std::span<const std::uint16_t> candidate_coords,
                                         std::uint32_t min_samples_leaf = 1);

// Per-tree seed derived from the forest seed and the tree index.
std::uint64_t tree_seed(std::uint64_t forest_seed, std::uint32_t tree_index);

// floor(fraction * n) distinct sample indices in ascending order.
std::vector<std::uint32_t> bag_samples(std::size_t n, double fraction,
                                       std::uint64_t seed);

LogicalTree train_tree(const Dataset& data, std::span<const std::uint32_t> samples,
                       const TrainConfig& config, std::uint64_t seed);
LogicalTree train_tree(const Dataset& data, const TrainConfig& config,
                       std::uint64_t seed);

// Logical trees of the forest, before memory-image conversion.
std::vector<LogicalTree> train_logical_forest(const Dataset& data,
                                              const TrainConfig& config);

ForestModel train_forest(const Dataset& data, const TrainConfig& config);

}  // namespace rfhw
