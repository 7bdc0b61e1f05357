#include "rfhw/logical_tree.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>

namespace rfhw {

LogicalTree::LogicalTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw std::invalid_argument("LogicalTree: no nodes");
  const auto n = static_cast<std::int32_t>(nodes_.size());
  std::vector<std::uint8_t> referenced(nodes_.size(), 0);
  for (std::int32_t i = 0; i < n; ++i) {
    const TreeNode& nd = nodes_[static_cast<std::size_t>(i)];
    if (nd.leaf) continue;
    for (std::int32_t c : {nd.le, nd.gt}) {
      if (c <= 0 || c >= n) {
        throw std::invalid_argument("LogicalTree: node " + std::to_string(i) +
                                    " has invalid child " + std::to_string(c));
      }
      if (referenced[static_cast<std::size_t>(c)]++ != 0) {
        throw std::invalid_argument("LogicalTree: node " + std::to_string(c) +
                                    " has more than one parent");
      }
    }
  }
}

LogicalTree LogicalTree::constant(ClassLabel label) {
  TreeNode leaf;
  leaf.label = label;
  return LogicalTree({leaf});
}

std::uint32_t LogicalTree::depth() const {
  if (nodes_.empty()) return 0;
  std::uint32_t deepest = 0;
  std::vector<std::pair<std::int32_t, std::uint32_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    const TreeNode& nd = node(i);
    if (nd.leaf) {
      deepest = std::max(deepest, d);
    } else {
      stack.emplace_back(nd.le, d + 1);
      stack.emplace_back(nd.gt, d + 1);
    }
  }
  return deepest;
}

ClassLabel LogicalTree::max_label() const {
  ClassLabel m = 0;
  for (const TreeNode& nd : nodes_) {
    if (nd.leaf) m = std::max(m, nd.label);
  }
  return m;
}

std::uint16_t LogicalTree::max_coord() const {
  std::uint16_t m = 0;
  for (const TreeNode& nd : nodes_) {
    if (!nd.leaf) m = std::max(m, nd.coord);
  }
  return m;
}

ClassLabel LogicalTree::predict(std::span<const std::uint8_t> x) const {
  std::int32_t i = 0;
  while (!node(i).leaf) {
    const TreeNode& nd = node(i);
    if (nd.coord >= x.size()) {
      throw std::invalid_argument("LogicalTree::predict: feature " +
                                  std::to_string(nd.coord) + " missing from input of " +
                                  std::to_string(x.size()));
    }
    i = x[nd.coord] <= nd.value ? nd.le : nd.gt;
  }
  return node(i).label;
}

}  // namespace rfhw
