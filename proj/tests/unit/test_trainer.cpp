#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "oracles.hpp"
#include "rfhw/trainer.hpp"

namespace rfhw {
namespace {

std::vector<std::uint32_t> all_samples(const Dataset& d) {
  std::vector<std::uint32_t> s(d.size());
  std::iota(s.begin(), s.end(), 0u);
  return s;
}

std::vector<std::uint16_t> all_coords(const Dataset& d) {
  std::vector<std::uint16_t> c(d.num_features);
  std::iota(c.begin(), c.end(), std::uint16_t{0});
  return c;
}

TEST(Gini, Examples) {
  EXPECT_DOUBLE_EQ(gini(std::vector<std::uint64_t>{5, 5}), 0.5);
  EXPECT_DOUBLE_EQ(gini(std::vector<std::uint64_t>{10, 0}), 0.0);
  EXPECT_DOUBLE_EQ(gini(std::vector<std::uint64_t>{1, 1, 1, 1}), 0.75);
  EXPECT_THROW(gini(std::vector<std::uint64_t>{0, 0}), std::invalid_argument);
}

TEST(MajorityLabel, TiesGoHigh) {
  EXPECT_EQ(majority_label(std::vector<std::uint64_t>{3, 3, 1}), 1u);
  EXPECT_EQ(majority_label(std::vector<std::uint64_t>{4, 3, 1}), 0u);
}

TEST(BestSplit, TwoSamples) {
  Dataset d;
  d.num_features = 1;
  d.num_classes = 2;
  d.features = {10, 200};
  d.labels = {0, 1};
  const auto s = best_split(d, all_samples(d), all_coords(d));
  ASSERT_TRUE(s.has_value());
  EXPECT_EQ(s->coord, 0u);
  EXPECT_EQ(s->value, 10u);
  EXPECT_EQ(s->left, 1u);
  EXPECT_EQ(s->right, 1u);
  EXPECT_DOUBLE_EQ(s->weighted_impurity, 0.0);
}

TEST(BestSplit, PureNodeHasNone) {
  Dataset d;
  d.num_features = 2;
  d.num_classes = 3;
  d.features = {1, 2, 3, 4, 5, 6};
  d.labels = {2, 2, 2};
  EXPECT_FALSE(best_split(d, all_samples(d), all_coords(d)).has_value());
}

TEST(BestSplit, TiesPreferLowestCoordinateThenThreshold) {
  Dataset d;
  d.num_features = 2;
  d.num_classes = 2;
  // Both coordinates separate the classes perfectly.
  d.features = {1, 1, 2, 2, 8, 8, 9, 9};
  d.labels = {0, 0, 1, 1};
  const auto s = best_split(d, all_samples(d), std::vector<std::uint16_t>{1, 0});
  ASSERT_TRUE(s.has_value());
  EXPECT_EQ(s->coord, 0u);
  EXPECT_EQ(s->value, 2u);
}

TEST(BestSplit, MinSamplesLeaf) {
  Dataset d;
  d.num_features = 1;
  d.num_classes = 2;
  d.features = {1, 2, 3, 4};
  d.labels = {0, 1, 1, 1};
  const auto s = best_split(d, all_samples(d), all_coords(d), 2);
  ASSERT_TRUE(s.has_value());
  EXPECT_EQ(s->value, 2u);
  EXPECT_FALSE(best_split(d, all_samples(d), all_coords(d), 3).has_value());
}

void expect_matches_brute_force(const Dataset& d, const std::vector<std::uint32_t>& samples,
                                const std::vector<std::uint16_t>& coords) {
  const auto fast = best_split(d, samples, coords);
  const auto slow = testing::brute_force_split(d, samples, coords);
  ASSERT_EQ(fast.has_value(), slow.has_value());
  if (fast) {
    EXPECT_EQ(fast->coord, slow->coord);
    EXPECT_EQ(fast->value, slow->value);
  }
}

TEST(BestSplit, MatchesBruteForceSmall) {
  std::mt19937_64 rng(50);
  for (int i = 0; i < 100; ++i) {
    const auto d = testing::random_dataset(rng, 50, 3, 3, 1 + rng() % 40);
    expect_matches_brute_force(d, all_samples(d), all_coords(d));
  }
}

TEST(BestSplit, HistogramPathMatchesBruteForce) {
  std::mt19937_64 rng(51);
  for (int i = 0; i < 10; ++i) {
    const auto d = testing::random_dataset(rng, 300 + rng() % 200, 4, 4, 1 + rng() % 256);
    expect_matches_brute_force(d, all_samples(d), {3, 1});
  }
}

TEST(BaggingAndSeeds, BagWithoutReplacement) {
  const auto bag = bag_samples(1000, 0.75, 9);
  EXPECT_EQ(bag.size(), 750u);
  EXPECT_EQ(std::set<std::uint32_t>(bag.begin(), bag.end()).size(), 750u);
  EXPECT_TRUE(std::is_sorted(bag.begin(), bag.end()));
  EXPECT_EQ(bag, bag_samples(1000, 0.75, 9));
  EXPECT_NE(bag, bag_samples(1000, 0.75, 10));
  EXPECT_EQ(bag_samples(10, 1.0, 1).size(), 10u);
  EXPECT_THROW(bag_samples(10, 0.0, 1), std::invalid_argument);
  EXPECT_NE(tree_seed(1, 0), tree_seed(1, 1));
  EXPECT_NE(tree_seed(1, 0), tree_seed(2, 0));
}

TEST(TrainConfig, Validation) {
  TrainConfig c;
  EXPECT_EQ(c.split_features(784), 28u);
  EXPECT_EQ(c.split_features(5), 3u);
  EXPECT_NO_THROW(c.validate(784));
  c.num_trees = 1;
  EXPECT_THROW(c.validate(784), std::invalid_argument);
  c = TrainConfig{};
  c.max_levels = 0;
  EXPECT_THROW(c.validate(784), std::invalid_argument);
  c = TrainConfig{};
  c.features_per_split = 785;
  EXPECT_THROW(c.validate(784), std::invalid_argument);
}

TEST(TrainTree, SeparableOneFeature) {
  Dataset d;
  d.num_features = 1;
  d.num_classes = 2;
  for (int i = 0; i < 40; ++i) {
    d.features.push_back(static_cast<std::uint8_t>(i * 5));
    d.labels.push_back(i < 17 ? 0 : 1);
  }
  TrainConfig c;
  c.max_levels = 5;
  const auto t = train_tree(d, c, 1);
  EXPECT_EQ(t.depth(), 1u);
  for (std::size_t i = 0; i < d.size(); ++i) EXPECT_EQ(t.predict(d.row(i)), d.labels[i]);
}

TEST(TrainTree, SingleClassIsLeaf) {
  Dataset d;
  d.num_features = 2;
  d.num_classes = 4;
  d.features = {1, 2, 3, 4, 5, 6};
  d.labels = {3, 3, 3};
  const auto t = train_tree(d, TrainConfig{}, 1);
  ASSERT_EQ(t.nodes().size(), 1u);
  EXPECT_EQ(t.root().label, 3u);
}

TEST(TrainTree, RespectsDepthAndIsDeterministic) {
  std::mt19937_64 rng(3);
  const auto d = testing::random_dataset(rng, 400, 8, 5);
  TrainConfig c;
  c.max_levels = 4;
  const auto a = train_tree(d, c, 77);
  EXPECT_LE(a.depth(), 4u);
  EXPECT_EQ(a, train_tree(d, c, 77));
}

TEST(TrainForest, TinySetReproducedByBothTrees) {
  Dataset d;
  d.num_features = 2;
  d.num_classes = 3;
  d.features = {0, 9, 60, 9, 120, 200, 180, 200};
  d.labels = {0, 1, 2, 2};
  TrainConfig c;
  c.num_trees = 2;
  c.max_levels = 3;
  c.bagging_fraction = 1.0;
  c.features_per_split = 2;
  const auto trees = train_logical_forest(d, c);
  ASSERT_EQ(trees.size(), 2u);
  for (const auto& t : trees)
    for (std::size_t i = 0; i < d.size(); ++i) EXPECT_EQ(t.predict(d.row(i)), d.labels[i]);
}

TEST(TrainForest, DeterministicAcrossWorkers) {
  std::mt19937_64 rng(4);
  const auto d = testing::random_dataset(rng, 300, 9, 3, 16);
  TrainConfig c;
  c.num_trees = 6;
  c.max_levels = 5;
  c.seed = 123;
  const auto a = train_forest(d, c);
  c.workers = 3;
  const auto b = train_forest(d, c);
  EXPECT_TRUE(same_structure(a, b));
  EXPECT_NO_THROW(a.validate());
  EXPECT_EQ(a.levels, 5u);
  EXPECT_FALSE(a.metadata.empty());
}

TEST(TrainForest, RejectsBadInput) {
  Dataset empty;
  empty.num_features = 2;
  empty.num_classes = 2;
  EXPECT_THROW(train_forest(empty, TrainConfig{}), std::invalid_argument);
  Dataset bad;
  bad.num_features = 1;
  bad.num_classes = 2;
  bad.features = {1};
  bad.labels = {5};
  EXPECT_THROW(train_forest(bad, TrainConfig{}), std::invalid_argument);
}

}  // namespace
}  // namespace rfhw
