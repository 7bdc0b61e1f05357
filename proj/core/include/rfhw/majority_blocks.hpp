#pragma once

// Streaming, clock-driven majority blocks. Both accept at most one vote vector
// per tick and report a decision on the tick its output becomes valid. State
// updates are computed from pre-tick registers and committed together.

#include <cstdint>
#include <optional>
#include <vector>

#include "rfhw/majority_vote.hpp"

namespace rfhw {

struct MajorityOutput {
  ClassLabel label = 0;
  std::uint64_t tag = 0;     // caller-supplied id of the input
  Cycles issued_at = 0;      // tick that carried the input strobe
  Cycles valid_at = 0;       // tick at whose end the output is valid
  Cycles latency() const noexcept { return valid_at - issued_at + 1; }
};

// Iterative variant: pipelined adder trees, one shared subtractor bank.
// The subtractor accepts a new count vector while in its final (zero-OR)
// cycle, so inputs may be issued every issue_interval(T) ticks. Issuing
// faster than that can collide with an unfinished decision, which throws
// ContractViolation instead of corrupting state.
class IterativeMajorityBlock {
 public:
  IterativeMajorityBlock(std::uint32_t num_inputs, std::uint32_t num_classes);

  std::optional<MajorityOutput> tick(const VoteVector* input = nullptr,
                                     std::uint64_t tag = 0);

  Cycles cycle() const noexcept { return cycle_; }
  bool idle() const noexcept;
  void set_trace(MajorityTraceSink sink) { trace_ = std::move(sink); }

 private:
  struct InFlight {
    AdderLevel level;
    std::uint64_t tag = 0;
    Cycles issued_at = 0;
  };
  struct Decision {
    ClassCounts counts;
    std::uint64_t tag = 0;
    Cycles issued_at = 0;
  };

  std::uint32_t num_inputs_;
  std::uint32_t num_classes_;
  AdderTreePlan plan_;
  std::vector<std::optional<InFlight>> adder_regs_;  // one per stage
  std::optional<Decision> subtractor_;
  Cycles cycle_ = 0;
  MajorityTraceSink trace_;
};

// Fully pipelined variant: ceil(log2 T) adder stages followed by
// floor(log2 T) + 1 subtraction stages. A stage resolves when at most one
// count is sign-clear or its OR word is zero; resolved decisions bypass the
// remaining stages. Output is read from the last stage register.
class PipelinedMajorityBlock {
 public:
  PipelinedMajorityBlock(std::uint32_t num_inputs, std::uint32_t num_classes);

  std::optional<MajorityOutput> tick(const VoteVector* input = nullptr,
                                     std::uint64_t tag = 0);

  Cycles cycle() const noexcept { return cycle_; }
  std::uint32_t subtraction_stages() const noexcept {
    return static_cast<std::uint32_t>(sub_regs_.size());
  }
  // True when no undelivered decision is in flight.
  bool idle() const noexcept;

 private:
  struct InFlight {
    AdderLevel level;
    std::uint64_t tag = 0;
    Cycles issued_at = 0;
  };
  struct StageReg {
    ClassCounts counts;
    bool resolved = false;
    ClassLabel label = 0;
    std::uint64_t tag = 0;
    Cycles issued_at = 0;
  };

  std::uint32_t num_inputs_;
  std::uint32_t num_classes_;
  AdderTreePlan plan_;
  std::vector<std::optional<InFlight>> adder_regs_;
  std::vector<std::optional<StageReg>> sub_regs_;
  Cycles cycle_ = 0;
};

// Feeds one vector per tick starting at tick 1 and drains the pipeline.
// Outputs come back in input order.
std::vector<MajorityOutput> run_pipelined(const std::vector<VoteVector>& stream);

// Issues one vector every `interval` ticks into an iterative block and drains.
std::vector<MajorityOutput> run_iterative_stream(
    const std::vector<VoteVector>& stream, Cycles interval);

}  // namespace rfhw
