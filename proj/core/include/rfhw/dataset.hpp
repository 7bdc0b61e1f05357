#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rfhw/majority_vote.hpp"

namespace rfhw {

// N samples of p unsigned 8-bit features, row-major, with labels in [0, K).
struct Dataset {
  std::uint32_t num_features = 0;
  std::uint32_t num_classes = 0;
  std::vector<std::uint8_t> features;
  std::vector<ClassLabel> labels;

  std::size_t size() const noexcept { return labels.size(); }
  bool empty() const noexcept { return labels.empty(); }
  std::span<const std::uint8_t> row(std::size_t i) const noexcept {
    return {features.data() + i * num_features, num_features};
  }
  std::vector<std::span<const std::uint8_t>> rows() const;

  // Throws std::invalid_argument on inconsistent sizes or labels >= K.
  void validate() const;
};

}  // namespace rfhw
