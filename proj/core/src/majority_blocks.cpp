#include "rfhw/majority_blocks.hpp"

#include <stdexcept>
#include <string>

#include "rfhw/errors.hpp"

namespace rfhw {

namespace {

void check_shape(const VoteVector& v, std::uint32_t t, std::uint32_t k) {
  if (v.num_inputs() != t || v.num_classes() != k) {
    throw std::invalid_argument(
        "majority block built for T=" + std::to_string(t) + ", K=" + std::to_string(k) +
        " got T=" + std::to_string(v.num_inputs()) + ", K=" +
        std::to_string(v.num_classes()));
  }
}

std::string signs_of(const ClassCounts& counts) {
  std::string s;
  for (std::uint32_t j = counts.size(); j-- > 0;) s.push_back(counts.sign(j) ? '1' : '0');
  return s;
}

}  // namespace

IterativeMajorityBlock::IterativeMajorityBlock(std::uint32_t num_inputs,
                                               std::uint32_t num_classes)
    : num_inputs_(num_inputs),
      num_classes_(num_classes),
      plan_(AdderTreePlan::for_inputs(num_inputs)),
      adder_regs_(plan_.depth()) {
  if (num_classes < 2) throw std::invalid_argument("majority block needs K >= 2");
}

bool IterativeMajorityBlock::idle() const noexcept {
  if (subtractor_) return false;
  for (const auto& r : adder_regs_) {
    if (r) return false;
  }
  return true;
}

std::optional<MajorityOutput> IterativeMajorityBlock::tick(const VoteVector* input,
                                                           std::uint64_t tag) {
  if (input != nullptr) check_shape(*input, num_inputs_, num_classes_);
  ++cycle_;

  MajorityTraceRow row;
  row.cycle = cycle_;
  row.phase = "idle";

  std::optional<MajorityOutput> out;
  std::optional<Decision> next_sub;
  if (subtractor_) {
    Decision d = *subtractor_;
    row.phase = "subtract";
    row.sign_bits = signs_of(d.counts);
    const SubtractionCycle cyc = subtraction_cycle(d.counts);
    row.or_word = cyc.or_word;
    row.lod = cyc.lod;
    if (cyc.all_negative_after) {
      out = MajorityOutput{*cyc.encoder, d.tag, d.issued_at, cycle_};
      row.output = out->label;
    } else {
      next_sub = std::move(d);
    }
  }

  // The last adder register feeds the subtractor bank. A load is only legal
  // when the bank is free or finishing this very cycle.
  if (auto& last = adder_regs_.back()) {
    if (next_sub) {
      throw ContractViolation("IterativeMajorityBlock: input issued at cycle " +
                              std::to_string(last->issued_at) +
                              " reached a busy subtractor at cycle " +
                              std::to_string(cycle_));
    }
    next_sub = Decision{ClassCounts::from_magnitudes(last->level.values,
                                                     plan_.count_width()),
                        last->tag, last->issued_at};
    if (row.phase == "idle") row.phase = "load";
  }
  if (row.phase == "idle" && !idle()) row.phase = "adding";
  if (row.phase == "idle" && input != nullptr) row.phase = "adding";

  const auto stages = plan_.stages();
  for (std::size_t s = adder_regs_.size(); s-- > 1;) {
    if (adder_regs_[s - 1]) {
      InFlight f = std::move(*adder_regs_[s - 1]);
      f.level = add_stage(f.level, stages[s], num_classes_);
      adder_regs_[s] = std::move(f);
    } else {
      adder_regs_[s].reset();
    }
  }
  if (input != nullptr) {
    adder_regs_[0] = InFlight{
        add_stage(adder_inputs(decode_one_hot(*input)), stages[0], num_classes_), tag,
        cycle_};
  } else {
    adder_regs_[0].reset();
  }

  subtractor_ = std::move(next_sub);
  if (trace_) trace_(row);
  return out;
}

PipelinedMajorityBlock::PipelinedMajorityBlock(std::uint32_t num_inputs,
                                               std::uint32_t num_classes)
    : num_inputs_(num_inputs),
      num_classes_(num_classes),
      plan_(AdderTreePlan::for_inputs(num_inputs)),
      adder_regs_(plan_.depth()),
      sub_regs_(floor_log2(num_inputs) + 1) {
  if (num_classes < 2) throw std::invalid_argument("majority block needs K >= 2");
}

bool PipelinedMajorityBlock::idle() const noexcept {
  for (const auto& r : adder_regs_) {
    if (r) return false;
  }
  // The last stage register only holds a decision that tick() already reported.
  for (std::size_t j = 0; j + 1 < sub_regs_.size(); ++j) {
    if (sub_regs_[j]) return false;
  }
  return true;
}

namespace {

template <typename StageReg>
StageReg subtraction_stage(StageReg reg) {
  if (reg.resolved) return reg;
  std::uint32_t or_word = 0;
  for (std::uint32_t j = 0; j < reg.counts.size(); ++j) {
    if (!reg.counts.sign(j)) or_word |= reg.counts.magnitude(j);
  }
  if (reg.counts.sign_clear_count() <= 1 || or_word == 0) {
    reg.resolved = true;
    reg.label = *highest_sign_clear(reg.counts);
    return reg;
  }
  const std::uint32_t lod = *leading_one(or_word);
  for (std::uint32_t j = 0; j < reg.counts.size(); ++j) {
    if (!reg.counts.sign(j)) reg.counts.subtract(j, lod);
  }
  return reg;
}

}  // namespace

std::optional<MajorityOutput> PipelinedMajorityBlock::tick(const VoteVector* input,
                                                           std::uint64_t tag) {
  if (input != nullptr) check_shape(*input, num_inputs_, num_classes_);
  ++cycle_;

  for (std::size_t j = sub_regs_.size(); j-- > 0;) {
    std::optional<StageReg> src;
    if (j == 0) {
      if (const auto& last = adder_regs_.back()) {
        StageReg r;
        r.counts =
            ClassCounts::from_magnitudes(last->level.values, plan_.count_width());
        r.tag = last->tag;
        r.issued_at = last->issued_at;
        src = std::move(r);
      }
    } else {
      src = std::move(sub_regs_[j - 1]);
    }
    if (src) {
      sub_regs_[j] = subtraction_stage(std::move(*src));
    } else {
      sub_regs_[j].reset();
    }
  }

  const auto stages = plan_.stages();
  for (std::size_t s = adder_regs_.size(); s-- > 1;) {
    if (adder_regs_[s - 1]) {
      InFlight f = std::move(*adder_regs_[s - 1]);
      f.level = add_stage(f.level, stages[s], num_classes_);
      adder_regs_[s] = std::move(f);
    } else {
      adder_regs_[s].reset();
    }
  }
  if (input != nullptr) {
    adder_regs_[0] = InFlight{
        add_stage(adder_inputs(decode_one_hot(*input)), stages[0], num_classes_), tag,
        cycle_};
  } else {
    adder_regs_[0].reset();
  }

  const auto& tail = sub_regs_.back();
  if (!tail) return std::nullopt;
  if (!tail->resolved) {
    throw std::logic_error("PipelinedMajorityBlock: decision unresolved after " +
                           std::to_string(sub_regs_.size()) + " subtraction stages");
  }
  return MajorityOutput{tail->label, tail->tag, tail->issued_at, cycle_};
}

std::vector<MajorityOutput> run_pipelined(const std::vector<VoteVector>& stream) {
  std::vector<MajorityOutput> outputs;
  if (stream.empty()) return outputs;
  PipelinedMajorityBlock block(stream.front().num_inputs(),
                               stream.front().num_classes());
  outputs.reserve(stream.size());
  for (std::size_t i = 0; i < stream.size(); ++i) {
    if (auto o = block.tick(&stream[i], i)) outputs.push_back(*o);
  }
  while (outputs.size() < stream.size()) {
    if (auto o = block.tick()) outputs.push_back(*o);
  }
  return outputs;
}

std::vector<MajorityOutput> run_iterative_stream(const std::vector<VoteVector>& stream,
                                                 Cycles interval) {
  std::vector<MajorityOutput> outputs;
  if (stream.empty()) return outputs;
  if (interval == 0) throw std::invalid_argument("issue interval must be positive");
  IterativeMajorityBlock block(stream.front().num_inputs(),
                               stream.front().num_classes());
  outputs.reserve(stream.size());
  std::size_t next = 0;
  while (outputs.size() < stream.size()) {
    const bool issue = next < stream.size() && block.cycle() % interval == 0;
    std::optional<MajorityOutput> o;
    if (issue) {
      o = block.tick(&stream[next], next);
      ++next;
    } else {
      o = block.tick();
    }
    if (o) outputs.push_back(*o);
  }
  return outputs;
}

}  // namespace rfhw
