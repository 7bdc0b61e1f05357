#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rfhw/majority_vote.hpp"

namespace rfhw {

// A trained binary decision tree in pointer-free form. Node 0 is the root.
// A decision node routes x to `le` when x[coord] <= value and to `gt`
// otherwise.
struct TreeNode {
  bool leaf = true;
  ClassLabel label = 0;
  std::uint16_t coord = 0;
  std::uint8_t value = 0;
  std::int32_t le = -1;
  std::int32_t gt = -1;

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

class LogicalTree {
 public:
  LogicalTree() = default;
  explicit LogicalTree(std::vector<TreeNode> nodes);

  static LogicalTree constant(ClassLabel label);

  std::span<const TreeNode> nodes() const noexcept { return nodes_; }
  const TreeNode& root() const { return nodes_.front(); }
  const TreeNode& node(std::int32_t i) const { return nodes_.at(static_cast<std::size_t>(i)); }
  bool empty() const noexcept { return nodes_.empty(); }

  // Number of decision levels on the longest root-to-leaf path.
  std::uint32_t depth() const;
  ClassLabel max_label() const;
  std::uint16_t max_coord() const;

  ClassLabel predict(std::span<const std::uint8_t> x) const;

  friend bool operator==(const LogicalTree&, const LogicalTree&) = default;

 private:
  std::vector<TreeNode> nodes_;
};

}  // namespace rfhw
