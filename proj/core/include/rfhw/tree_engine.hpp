#pragma once

// Cycle-accurate model of one tree-processing unit: a split-coordinate memory,
// a split-value memory (which also holds the leaf labels) and a node-address
// register updated by shift-and-set.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rfhw/bits.hpp"
#include "rfhw/logical_tree.hpp"
#include "rfhw/majority_vote.hpp"

namespace rfhw {

using FeatureSpan = std::span<const std::uint8_t>;

// Node numbering starts at the root with 1; node a has children 2a and 2a+1.
// The comparison bit is ORed into the shifted address.
constexpr std::uint32_t child_address(std::uint32_t addr, bool taken) noexcept {
  return (addr << 1) | (taken ? 1u : 0u);
}

// 3 clocks per decision level plus one to emit the leaf.
Cycles tree_cycles(std::uint32_t levels);

// Contents of the two block RAMs of a tree unit for a tree of `levels`
// decision levels. Decision addresses are 1 .. 2^l - 1, leaf addresses
// 2^l .. 2^(l+1) - 1; address 0 is unused.
class TreeMemoryImage {
 public:
  TreeMemoryImage() = default;
  explicit TreeMemoryImage(std::uint32_t levels);

  std::uint32_t levels() const noexcept { return levels_; }
  std::uint32_t first_leaf() const noexcept { return 1u << levels_; }
  std::uint32_t end_address() const noexcept { return 2u << levels_; }

  // Bounds-checked reads; an out-of-range address throws ContractViolation.
  std::uint16_t coord_at(std::uint32_t addr) const;
  std::uint8_t value_at(std::uint32_t addr) const;

  void set_coord(std::uint32_t addr, std::uint16_t coord);
  void set_value(std::uint32_t addr, std::uint8_t value);

  // coord_mem()[0] and value_mem()[0] are the unused address 0.
  std::span<const std::uint16_t> coord_mem() const noexcept { return coord_mem_; }
  std::span<const std::uint8_t> value_mem() const noexcept { return value_mem_; }

  // Throws std::invalid_argument unless every coordinate is < p and every
  // leaf label is < K.
  void validate(std::uint32_t num_features, std::uint32_t num_classes) const;

  friend bool operator==(const TreeMemoryImage&, const TreeMemoryImage&) = default;

 private:
  std::uint32_t levels_ = 0;
  std::vector<std::uint16_t> coord_mem_;
  std::vector<std::uint8_t> value_mem_;
};

// Lays a logical tree out at breadth-first addresses. Leaves above the last
// level become pass-through nodes whose whole subtree carries the leaf label,
// so the fixed 3l+1 schedule always lands on the right leaf. Throws
// std::invalid_argument if the tree is deeper than `levels` or a label does
// not fit the 8-bit value memory.
TreeMemoryImage build_memory_image(const LogicalTree& tree, std::uint32_t levels);

enum class TreePhase { fetch_node, fetch_feature, compare, emit_leaf, finished };
const char* to_string(TreePhase phase) noexcept;

struct TreeUnitState {
  std::uint32_t node_address = 1;
  TreePhase phase = TreePhase::fetch_node;
  std::uint32_t level = 0;
  Cycles cycle = 0;
  // Pipeline registers fed by the synchronous memory reads.
  std::uint16_t coord_reg = 0;
  std::uint8_t split_reg = 0;
  std::uint8_t feature_reg = 0;
  std::optional<ClassLabel> output;
};

// One clock of the tree unit. Comparison is true when x[coord] <= split value
// and selects the odd child. Throws ContractViolation once finished, and
// std::invalid_argument when x is shorter than a referenced coordinate.
TreeUnitState step_tree(TreeUnitState state, const TreeMemoryImage& mem, FeatureSpan x);

struct TreeRun {
  ClassLabel label = 0;
  Cycles cycles = 0;
};

TreeRun run_tree(const TreeMemoryImage& mem, FeatureSpan x);

}  // namespace rfhw
