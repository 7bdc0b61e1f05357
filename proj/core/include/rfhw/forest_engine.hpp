#pragma once

// T tree-processing units in lockstep feeding one majority block, with exact
// cycle accounting for single classifications and for streams.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rfhw/bits.hpp"
#include "rfhw/majority_vote.hpp"
#include "rfhw/tree_engine.hpp"

namespace rfhw {

struct ForestModel {
  std::uint32_t num_classes = 0;
  std::uint32_t num_features = 0;
  std::uint32_t levels = 0;
  std::vector<TreeMemoryImage> trees;
  std::string metadata;  // provenance note; not part of the binary file

  std::uint32_t num_trees() const noexcept {
    return static_cast<std::uint32_t>(trees.size());
  }

  // T >= 2, 2 <= K <= 256, uniform levels, coordinates < p, leaves < K.
  void validate() const;
};

// Equality of everything the hardware sees (metadata excluded).
bool same_structure(const ForestModel& a, const ForestModel& b);

enum class MajorityVariant { iterative, pipelined };
const char* to_string(MajorityVariant v) noexcept;

struct EngineOptions {
  MajorityVariant variant = MajorityVariant::iterative;
  unsigned workers = 1;
};

struct ClassificationTrace {
  std::vector<ClassLabel> tree_outputs;
  ClassLabel majority_output = 0;
  Cycles tree_cycles = 0;        // 3l + 1
  Cycles majority_latency = 0;   // measured, data dependent for the iterative block
  Cycles first_latency = 0;      // tree_cycles + majority_latency
  Cycles steady_interval = 0;    // admission interval of the stream
  // Absolute ticks (first tick is 1). The forest result register publishes
  // every decision in a fixed slot sized for the worst-case majority latency.
  Cycles admitted_at = 0;
  Cycles valid_at = 0;
  Cycles published_at = 0;
};

// Worst-case clocks to classify one vector with the iterative block.
Cycles first_latency(std::uint32_t num_trees, std::uint32_t levels);
// Clocks between classifications under streaming: 3l + 1.
Cycles steady_interval(std::uint32_t levels);
// floor(clock_hz / steady_interval(levels)). Throws for clock_hz <= 0.
std::uint64_t throughput_at(double clock_hz, std::uint32_t levels);

class ForestEngine {
 public:
  explicit ForestEngine(ForestModel model, EngineOptions options = {});

  const ForestModel& model() const noexcept { return model_; }
  const EngineOptions& options() const noexcept { return options_; }

  // Ticks between input admissions: 3l+1, or the majority issue interval if
  // that is longer.
  Cycles admission_interval() const noexcept { return admission_interval_; }
  // Worst-case majority latency of the configured variant.
  Cycles worst_majority_latency() const noexcept { return worst_majority_; }
  // Clocks from admission to the published result.
  Cycles result_latency() const noexcept;

  ClassificationTrace classify_one(FeatureSpan x) const;

  std::vector<ClassificationTrace> classify_stream(
      const std::vector<FeatureSpan>& inputs) const;

  // Steps every unit and the majority block tick by tick for one input and
  // writes one line per clock up to the published result.
  ClassificationTrace trace(FeatureSpan x, std::ostream& out) const;

 private:
  std::vector<ClassLabel> run_trees(FeatureSpan x) const;
  void check_input(FeatureSpan x) const;

  ForestModel model_;
  EngineOptions options_;
  Cycles tree_cycles_ = 0;
  Cycles admission_interval_ = 0;
  Cycles worst_majority_ = 0;
};

}  // namespace rfhw
