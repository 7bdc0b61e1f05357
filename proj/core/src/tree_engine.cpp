#include "rfhw/tree_engine.hpp"

#include <stdexcept>
#include <string>

#include "rfhw/errors.hpp"

namespace rfhw {

Cycles tree_cycles(std::uint32_t levels) {
  if (levels < 1) throw std::invalid_argument("tree_cycles: need at least one level");
  return Cycles{3} * levels + 1;
}

TreeMemoryImage::TreeMemoryImage(std::uint32_t levels) : levels_(levels) {
  if (levels < 1 || levels > 24) {
    throw std::invalid_argument("TreeMemoryImage: levels must be in [1, 24], got " +
                                std::to_string(levels));
  }
  coord_mem_.assign(std::size_t{1} << levels, 0);
  value_mem_.assign(std::size_t{2} << levels, 0);
}

std::uint16_t TreeMemoryImage::coord_at(std::uint32_t addr) const {
  if (addr == 0 || addr >= first_leaf()) {
    throw ContractViolation("coordinate memory read at address " +
                            std::to_string(addr) + " outside [1, " +
                            std::to_string(first_leaf() - 1) + "]");
  }
  return coord_mem_[addr];
}

std::uint8_t TreeMemoryImage::value_at(std::uint32_t addr) const {
  if (addr == 0 || addr >= end_address()) {
    throw ContractViolation("value memory read at address " + std::to_string(addr) +
                            " outside [1, " + std::to_string(end_address() - 1) + "]");
  }
  return value_mem_[addr];
}

void TreeMemoryImage::set_coord(std::uint32_t addr, std::uint16_t coord) {
  if (addr == 0 || addr >= first_leaf()) {
    throw std::out_of_range("set_coord: address " + std::to_string(addr));
  }
  coord_mem_[addr] = coord;
}

void TreeMemoryImage::set_value(std::uint32_t addr, std::uint8_t value) {
  if (addr == 0 || addr >= end_address()) {
    throw std::out_of_range("set_value: address " + std::to_string(addr));
  }
  value_mem_[addr] = value;
}

void TreeMemoryImage::validate(std::uint32_t num_features,
                               std::uint32_t num_classes) const {
  for (std::uint32_t a = 1; a < first_leaf(); ++a) {
    if (coord_mem_[a] >= num_features) {
      throw std::invalid_argument("tree memory: coordinate " +
                                  std::to_string(coord_mem_[a]) + " at address " +
                                  std::to_string(a) + " is not below p = " +
                                  std::to_string(num_features));
    }
  }
  for (std::uint32_t a = first_leaf(); a < end_address(); ++a) {
    if (value_mem_[a] >= num_classes) {
      throw std::invalid_argument("tree memory: leaf label " +
                                  std::to_string(value_mem_[a]) + " at address " +
                                  std::to_string(a) + " is not below K = " +
                                  std::to_string(num_classes));
    }
  }
}

namespace {

void place(const LogicalTree& tree, std::int32_t index, std::uint32_t addr,
           std::uint32_t level, TreeMemoryImage& mem) {
  const TreeNode& nd = tree.node(index);
  if (level == mem.levels()) {
    if (!nd.leaf) throw std::invalid_argument("build_memory_image: tree deeper than levels");
    if (nd.label > 0xFF) {
      throw std::invalid_argument("build_memory_image: label " + std::to_string(nd.label) +
                                  " does not fit 8 bits");
    }
    mem.set_value(addr, static_cast<std::uint8_t>(nd.label));
    return;
  }
  if (nd.leaf) {
    // Pass-through: both children repeat this leaf.
    mem.set_coord(addr, 0);
    mem.set_value(addr, 0);
    place(tree, index, child_address(addr, true), level + 1, mem);
    place(tree, index, child_address(addr, false), level + 1, mem);
    return;
  }
  mem.set_coord(addr, nd.coord);
  mem.set_value(addr, nd.value);
  place(tree, nd.le, child_address(addr, true), level + 1, mem);
  place(tree, nd.gt, child_address(addr, false), level + 1, mem);
}

}  // namespace

TreeMemoryImage build_memory_image(const LogicalTree& tree, std::uint32_t levels) {
  if (tree.empty()) throw std::invalid_argument("build_memory_image: empty tree");
  if (tree.depth() > levels) {
    throw std::invalid_argument("build_memory_image: tree depth " +
                                std::to_string(tree.depth()) + " exceeds " +
                                std::to_string(levels) + " levels");
  }
  TreeMemoryImage mem(levels);
  place(tree, 0, 1, 0, mem);
  return mem;
}

const char* to_string(TreePhase phase) noexcept {
  switch (phase) {
    case TreePhase::fetch_node: return "fetch_node";
    case TreePhase::fetch_feature: return "fetch_feature";
    case TreePhase::compare: return "compare";
    case TreePhase::emit_leaf: return "emit_leaf";
    case TreePhase::finished: return "finished";
  }
  return "?";
}

TreeUnitState step_tree(TreeUnitState state, const TreeMemoryImage& mem, FeatureSpan x) {
  switch (state.phase) {
    case TreePhase::finished:
      throw ContractViolation("step_tree: unit already emitted its leaf");
    case TreePhase::fetch_node:
      state.coord_reg = mem.coord_at(state.node_address);
      state.split_reg = mem.value_at(state.node_address);
      state.phase = TreePhase::fetch_feature;
      break;
    case TreePhase::fetch_feature:
      if (state.coord_reg >= x.size()) {
        throw std::invalid_argument("step_tree: coordinate " +
                                    std::to_string(state.coord_reg) +
                                    " outside feature vector of " +
                                    std::to_string(x.size()));
      }
      state.feature_reg = x[state.coord_reg];
      state.phase = TreePhase::compare;
      break;
    case TreePhase::compare:
      state.node_address =
          child_address(state.node_address, state.feature_reg <= state.split_reg);
      ++state.level;
      state.phase = state.level == mem.levels() ? TreePhase::emit_leaf
                                                : TreePhase::fetch_node;
      break;
    case TreePhase::emit_leaf:
      state.output = mem.value_at(state.node_address);
      state.phase = TreePhase::finished;
      break;
  }
  ++state.cycle;
  return state;
}

TreeRun run_tree(const TreeMemoryImage& mem, FeatureSpan x) {
  TreeUnitState st;
  while (st.phase != TreePhase::finished) st = step_tree(st, mem, x);
  return {*st.output, st.cycle};
}

}  // namespace rfhw
