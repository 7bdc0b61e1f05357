#include "rfhw/dataset.hpp"

#include <stdexcept>
#include <string>

namespace rfhw {

std::vector<std::span<const std::uint8_t>> Dataset::rows() const {
  std::vector<std::span<const std::uint8_t>> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.push_back(row(i));
  return out;
}

void Dataset::validate() const {
  if (num_features == 0) throw std::invalid_argument("dataset has no features");
  if (features.size() != labels.size() * num_features) {
    throw std::invalid_argument("dataset holds " + std::to_string(features.size()) +
                                " feature bytes for " + std::to_string(labels.size()) +
                                " samples of " + std::to_string(num_features));
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= num_classes) {
      throw std::invalid_argument("label " + std::to_string(labels[i]) + " of sample " +
                                  std::to_string(i) + " is not below K = " +
                                  std::to_string(num_classes));
    }
  }
}

}  // namespace rfhw
