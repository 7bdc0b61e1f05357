#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "oracles.hpp"
#include "rfhw/errors.hpp"
#include "rfhw/tree_engine.hpp"

namespace rfhw {
namespace {

TEST(ChildAddress, ShiftAndSet) {
  static_assert(child_address(1, true) == 3);
  EXPECT_EQ(child_address(1, true), 3u);
  EXPECT_EQ(child_address(1, false), 2u);
  EXPECT_EQ(child_address(5, true), 11u);
}

TEST(TreeCycles, Examples) {
  EXPECT_EQ(tree_cycles(14), 43u);
  EXPECT_EQ(tree_cycles(1), 4u);
  EXPECT_EQ(tree_cycles(20), 61u);
}

TreeMemoryImage one_level() {
  TreeMemoryImage m(1);
  m.set_coord(1, 0);
  m.set_value(1, 128);
  m.set_value(2, 7);
  m.set_value(3, 4);
  return m;
}

TEST(TreeUnit, HandSteppedOneLevel) {
  const auto m = one_level();
  const std::vector<std::uint8_t> lo{100}, hi{200};
  TreeUnitState s;
  s = step_tree(s, m, lo);
  EXPECT_EQ(s.phase, TreePhase::fetch_feature);
  EXPECT_EQ(s.coord_reg, 0u);
  EXPECT_EQ(s.split_reg, 128u);
  s = step_tree(s, m, lo);
  EXPECT_EQ(s.phase, TreePhase::compare);
  EXPECT_EQ(s.feature_reg, 100u);
  s = step_tree(s, m, lo);
  EXPECT_EQ(s.phase, TreePhase::emit_leaf);
  EXPECT_EQ(s.node_address, 3u);
  s = step_tree(s, m, lo);
  EXPECT_EQ(s.phase, TreePhase::finished);
  EXPECT_EQ(s.cycle, 4u);
  EXPECT_EQ(s.output, 4u);
  EXPECT_THROW(step_tree(s, m, lo), ContractViolation);

  const auto r = run_tree(m, hi);
  EXPECT_EQ(r.label, 7u);
  EXPECT_EQ(r.cycles, 4u);
  EXPECT_EQ(run_tree(m, std::vector<std::uint8_t>{128}).label, 4u);
}

TEST(TreeUnit, FortyThreeCyclesAtFourteenLevels) {
  std::mt19937_64 rng(14);
  const auto tree = testing::random_tree(rng, 14, 784, 10, 0.05);
  const auto mem = build_memory_image(tree, 14);
  std::vector<std::uint8_t> x(784);
  for (auto& v : x) v = static_cast<std::uint8_t>(rng());
  const auto r = run_tree(mem, x);
  EXPECT_EQ(r.cycles, 43u);
  EXPECT_EQ(r.label, testing::eval_recursive(tree, x));
}

TEST(TreeUnit, ShortInputRejected) {
  const auto m = one_level();
  EXPECT_THROW(run_tree(m, std::vector<std::uint8_t>{}), std::invalid_argument);
}

TEST(MemoryImage, BoundsChecked) {
  TreeMemoryImage m(2);
  EXPECT_EQ(m.first_leaf(), 4u);
  EXPECT_EQ(m.end_address(), 8u);
  EXPECT_THROW(m.value_at(8), ContractViolation);
  EXPECT_THROW(m.coord_at(4), ContractViolation);
  EXPECT_THROW(m.coord_at(0), ContractViolation);
  EXPECT_THROW(TreeMemoryImage(0), std::invalid_argument);
}

TEST(MemoryImage, ConstantTreeFillsLeaves) {
  const auto m = build_memory_image(LogicalTree::constant(5), 3);
  for (std::uint32_t a = 8; a < 16; ++a) EXPECT_EQ(m.value_at(a), 5u);
}

TEST(MemoryImage, DepthOnePaddedToTwo) {
  TreeNode root;
  root.leaf = false;
  root.coord = 1;
  root.value = 50;
  root.le = 1;
  root.gt = 2;
  TreeNode a, b;
  a.label = 6;
  b.label = 2;
  const LogicalTree t({root, a, b});
  const auto m = build_memory_image(t, 2);
  // le child sits at address 3, its grandchildren at 6 and 7.
  EXPECT_EQ(m.value_at(6), 6u);
  EXPECT_EQ(m.value_at(7), 6u);
  EXPECT_EQ(m.value_at(4), 2u);
  EXPECT_EQ(m.value_at(5), 2u);
  EXPECT_EQ(m.coord_at(1), 1u);
  EXPECT_EQ(m.value_at(1), 50u);
}

TEST(MemoryImage, TooDeepRejected) {
  std::mt19937_64 rng(1);
  const auto t = testing::random_tree(rng, 4, 3, 2, 0.0);
  EXPECT_THROW(build_memory_image(t, 3), std::invalid_argument);
  EXPECT_NO_THROW(build_memory_image(t, 4));
}

TEST(MemoryImage, WideLabelRejected) {
  EXPECT_THROW(build_memory_image(LogicalTree::constant(256), 1), std::invalid_argument);
}

TEST(MemoryImage, ValidateRanges) {
  auto m = one_level();
  EXPECT_NO_THROW(m.validate(1, 8));
  EXPECT_THROW(m.validate(1, 7), std::invalid_argument);
  m.set_coord(1, 3);
  EXPECT_THROW(m.validate(3, 8), std::invalid_argument);
}

TEST(MemoryImage, EquivalentToLogicalTree) {
  std::mt19937_64 rng(1000);
  for (int i = 0; i < 1000; ++i) {
    const std::uint32_t depth = 1 + static_cast<std::uint32_t>(rng() % 8);
    const std::uint32_t levels = depth + static_cast<std::uint32_t>(rng() % 3);
    const auto tree = testing::random_tree(rng, depth, 6, 5);
    const auto mem = build_memory_image(tree, levels);
    std::vector<std::uint8_t> x(6);
    for (auto& v : x) v = static_cast<std::uint8_t>(rng());
    const auto r = run_tree(mem, x);
    ASSERT_EQ(r.label, testing::eval_recursive(tree, x));
    ASSERT_EQ(r.label, tree.predict(x));
    ASSERT_EQ(r.cycles, tree_cycles(levels));
  }
}

TEST(LogicalTree, RejectsBadStructure) {
  TreeNode root;
  root.leaf = false;
  root.le = 1;
  root.gt = 1;
  TreeNode leaf;
  EXPECT_THROW(LogicalTree({root, leaf}), std::invalid_argument);
  root.gt = 5;
  EXPECT_THROW(LogicalTree({root, leaf}), std::invalid_argument);
  EXPECT_THROW(LogicalTree(std::vector<TreeNode>{}), std::invalid_argument);
}

}  // namespace
}  // namespace rfhw
