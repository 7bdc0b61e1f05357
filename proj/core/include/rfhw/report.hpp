#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rfhw/forest_engine.hpp"

namespace rfhw {

// Summary of a classification run over a labelled dataset.
struct RunReport {
  std::string variant;
  std::uint32_t num_trees = 0;
  std::uint32_t levels = 0;
  std::uint64_t samples = 0;
  std::uint64_t correct = 0;
  double accuracy = 0.0;
  std::vector<std::vector<std::uint64_t>> confusion;  // [true class][predicted class]
  Cycles latency_min = 0;
  Cycles latency_max = 0;
  double latency_mean = 0.0;
  Cycles result_latency = 0;   // fixed publication slot of the engine
  Cycles first_output_at = 0;  // tick of the first published result
  Cycles steady_interval = 0;
  double clock_hz = 0.0;
  std::uint64_t throughput = 0;  // classifications per second at clock_hz

  // Human-readable block.
  std::string to_text() const;
  // Flat "key=value" lines; confusion rows as "confusion.<i>=a,b,c".
  std::string to_key_values() const;
};

// Throws std::invalid_argument when traces and labels are empty or differ in
// length.
RunReport build_report(const ForestEngine& engine,
                       const std::vector<ClassificationTrace>& traces,
                       std::span<const ClassLabel> labels, double clock_hz);

}  // namespace rfhw
