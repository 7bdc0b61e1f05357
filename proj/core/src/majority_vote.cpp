#include "rfhw/majority_vote.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

#include "rfhw/errors.hpp"

namespace rfhw {

VoteVector::VoteVector(std::vector<ClassLabel> votes, std::uint32_t num_classes)
    : votes_(std::move(votes)), num_classes_(num_classes) {
  if (votes_.size() < 2) {
    throw std::invalid_argument("VoteVector: need at least 2 votes, got " +
                                std::to_string(votes_.size()));
  }
  if (num_classes_ < 2) {
    throw std::invalid_argument("VoteVector: need at least 2 classes, got " +
                                std::to_string(num_classes_));
  }
  for (std::size_t i = 0; i < votes_.size(); ++i) {
    if (votes_[i] >= num_classes_) {
      throw std::invalid_argument("VoteVector: vote " + std::to_string(i) + " = " +
                                  std::to_string(votes_[i]) + " is not below K = " +
                                  std::to_string(num_classes_));
    }
  }
}

OneHotMatrix::OneHotMatrix(std::uint32_t rows, std::uint32_t cols)
    : rows_(rows), cols_(cols), bits_(std::size_t{rows} * cols, 0) {}

std::uint32_t OneHotMatrix::column_sum(std::uint32_t col) const noexcept {
  std::uint32_t sum = 0;
  for (std::uint32_t r = 0; r < rows_; ++r) sum += at(r, col) ? 1u : 0u;
  return sum;
}

OneHotMatrix decode_one_hot(const VoteVector& votes) {
  OneHotMatrix m(votes.num_inputs(), votes.num_classes());
  for (std::uint32_t i = 0; i < votes.num_inputs(); ++i) m.set(i, votes[i]);
  return m;
}

AdderTreePlan AdderTreePlan::for_inputs(std::uint32_t num_inputs) {
  if (num_inputs < 2) {
    throw std::invalid_argument("AdderTreePlan: T must be at least 2");
  }
  AdderTreePlan plan;
  plan.num_inputs_ = num_inputs;
  plan.count_width_ = ceil_log2(std::uint64_t{num_inputs} + 1);
  std::uint32_t operands = num_inputs;
  for (std::uint32_t s = 0; operands > 1; ++s) {
    AdderStage st;
    st.inputs = operands;
    st.adders = (operands + 1) / 2;
    st.input_width = s + 1;
    st.output_width = s + 2;
    plan.stages_.push_back(st);
    operands = st.adders;
  }
  if (plan.depth() != ceil_log2(num_inputs)) {
    throw std::logic_error("AdderTreePlan: depth does not match ceil(log2 T)");
  }
  return plan;
}

AdderLevel adder_inputs(const OneHotMatrix& onehot) {
  AdderLevel level;
  level.operands = onehot.rows();
  level.width = 1;
  level.values.resize(std::size_t{onehot.rows()} * onehot.cols());
  for (std::uint32_t c = 0; c < onehot.cols(); ++c) {
    for (std::uint32_t r = 0; r < onehot.rows(); ++r) {
      level.values[std::size_t{c} * onehot.rows() + r] = onehot.at(r, c) ? 1u : 0u;
    }
  }
  return level;
}

AdderLevel add_stage(const AdderLevel& in, const AdderStage& stage,
                     std::uint32_t num_classes) {
  if (in.operands != stage.inputs) {
    throw std::logic_error("add_stage: operand count does not match plan");
  }
  const std::uint64_t in_limit = std::uint64_t{1} << stage.input_width;
  const std::uint64_t out_limit = std::uint64_t{1} << stage.output_width;

  AdderLevel out;
  out.operands = stage.adders;
  out.width = stage.output_width;
  out.values.resize(std::size_t{num_classes} * stage.adders);

  for (std::uint32_t c = 0; c < num_classes; ++c) {
    const std::uint32_t* src = in.values.data() + std::size_t{c} * in.operands;
    std::uint32_t* dst = out.values.data() + std::size_t{c} * out.operands;
    for (std::uint32_t a = 0; a < stage.adders; ++a) {
      const std::uint32_t lhs = src[2 * a];
      const std::uint32_t rhs = 2 * a + 1 < in.operands ? src[2 * a + 1] : 0u;
      if (lhs >= in_limit || rhs >= in_limit) {
        throw WidthOverflow("adder operand exceeds " +
                            std::to_string(stage.input_width) + " bits");
      }
      const std::uint32_t sum = lhs + rhs;
      if (sum >= out_limit) {
        throw WidthOverflow("adder sum exceeds " +
                            std::to_string(stage.output_width) + " bits");
      }
      dst[a] = sum;
    }
  }
  return out;
}

ClassCounts::ClassCounts(std::uint32_t num_classes, std::uint32_t magnitude_width)
    : magnitude_width_(magnitude_width), words_(num_classes, 0) {}

ClassCounts ClassCounts::from_magnitudes(std::span<const std::uint32_t> magnitudes,
                                         std::uint32_t magnitude_width) {
  ClassCounts counts(static_cast<std::uint32_t>(magnitudes.size()), magnitude_width);
  for (std::size_t j = 0; j < magnitudes.size(); ++j) {
    if (magnitudes[j] > low_mask(magnitude_width)) {
      throw WidthOverflow("class count " + std::to_string(magnitudes[j]) +
                          " exceeds " + std::to_string(magnitude_width) + " bits");
    }
    counts.words_[j] = magnitudes[j];  // sign bit '0'
  }
  return counts;
}

std::int64_t ClassCounts::value(std::uint32_t j) const noexcept {
  const std::int64_t raw = words_[j];
  return sign(j) ? raw - (std::int64_t{1} << (magnitude_width_ + 1)) : raw;
}

bool ClassCounts::all_negative() const noexcept {
  for (std::uint32_t j = 0; j < size(); ++j) {
    if (!sign(j)) return false;
  }
  return true;
}

std::uint32_t ClassCounts::sign_clear_count() const noexcept {
  std::uint32_t n = 0;
  for (std::uint32_t j = 0; j < size(); ++j) n += sign(j) ? 0u : 1u;
  return n;
}

void ClassCounts::subtract(std::uint32_t j, std::uint32_t amount) {
  const std::int64_t exact = value(j) - std::int64_t{amount};
  const std::int64_t min_value = -(std::int64_t{1} << magnitude_width_);
  if (exact < min_value) {
    throw WidthOverflow("class count underflows its " +
                        std::to_string(magnitude_width_ + 1) + "-bit register");
  }
  const std::uint64_t mask = low_mask(magnitude_width_ + 1);
  words_[j] = static_cast<std::uint32_t>(
      (std::uint64_t{words_[j]} - std::uint64_t{amount}) & mask);
}

AdderTreeResult compute_class_counts(const OneHotMatrix& onehot,
                                     const AdderTreePlan& plan) {
  if (onehot.rows() != plan.num_inputs()) {
    throw std::invalid_argument("compute_class_counts: plan built for T = " +
                                std::to_string(plan.num_inputs()) + ", got " +
                                std::to_string(onehot.rows()) + " rows");
  }
  AdderTreeResult result;
  result.levels.reserve(plan.depth() + 1);
  result.levels.push_back(adder_inputs(onehot));
  for (const AdderStage& stage : plan.stages()) {
    result.levels.push_back(add_stage(result.levels.back(), stage, onehot.cols()));
    ++result.latency;
  }
  result.counts =
      ClassCounts::from_magnitudes(result.levels.back().values, plan.count_width());
  return result;
}

std::optional<std::uint32_t> leading_one(std::uint32_t or_word) noexcept {
  if (or_word == 0) return std::nullopt;
  return std::bit_floor(or_word);
}

std::optional<ClassLabel> highest_sign_clear(const ClassCounts& counts) noexcept {
  for (std::uint32_t j = counts.size(); j-- > 0;) {
    if (!counts.sign(j)) return j;
  }
  return std::nullopt;
}

SubtractionCycle subtraction_cycle(ClassCounts& counts) {
  SubtractionCycle cyc;
  for (std::uint32_t j = 0; j < counts.size(); ++j) {
    if (!counts.sign(j)) cyc.or_word |= counts.magnitude(j);
  }
  cyc.encoder = highest_sign_clear(counts);
  cyc.lod = leading_one(cyc.or_word);
  const std::uint32_t amount = cyc.lod.value_or(1u);
  for (std::uint32_t j = 0; j < counts.size(); ++j) {
    if (!counts.sign(j)) counts.subtract(j, amount);
  }
  cyc.all_negative_after = counts.all_negative();
  return cyc;
}

namespace {

std::string sign_string(const ClassCounts& counts) {
  std::string s;
  s.reserve(counts.size());
  for (std::uint32_t j = counts.size(); j-- > 0;) s.push_back(counts.sign(j) ? '1' : '0');
  return s;
}

}  // namespace

std::string format_trace_row(const MajorityTraceRow& row) {
  std::ostringstream os;
  os << "cycle=" << row.cycle << " phase=" << row.phase
     << " signs=" << (row.sign_bits.empty() ? "-" : row.sign_bits) << " or=";
  if (row.or_word) {
    os << *row.or_word;
  } else {
    os << '-';
  }
  os << " lod=";
  if (row.lod) {
    os << *row.lod;
  } else if (row.or_word) {
    os << "zero";
  } else {
    os << '-';
  }
  os << " out=";
  if (row.output) {
    os << *row.output;
  } else {
    os << '-';
  }
  return os.str();
}

const char* to_string(IterPhase phase) noexcept {
  switch (phase) {
    case IterPhase::idle: return "idle";
    case IterPhase::adding: return "adding";
    case IterPhase::latched: return "latched";
    case IterPhase::subtracting: return "subtracting";
    case IterPhase::done: return "done";
  }
  return "?";
}

IterMajorityState start_iterative(const VoteVector& votes) {
  IterMajorityState st;
  st.plan = AdderTreePlan::for_inputs(votes.num_inputs());
  st.num_classes = votes.num_classes();
  st.partial = adder_inputs(decode_one_hot(votes));
  st.phase = IterPhase::adding;
  return st;
}

IterMajorityState step_iterative(IterMajorityState state,
                                 const MajorityTraceSink* trace) {
  MajorityTraceRow row;
  switch (state.phase) {
    case IterPhase::idle:
      throw ContractViolation("step_iterative: block is idle");
    case IterPhase::done:
      throw ContractViolation("step_iterative: decision already complete");
    case IterPhase::adding: {
      const auto& stage = state.plan.stages()[state.adder_stage];
      row.phase = "adding[" + std::to_string(state.adder_stage) + "]";
      state.partial = add_stage(state.partial, stage, state.num_classes);
      if (++state.adder_stage == state.plan.depth()) state.phase = IterPhase::latched;
      break;
    }
    case IterPhase::latched:
      row.phase = "latch";
      state.counts =
          ClassCounts::from_magnitudes(state.partial.values, state.plan.count_width());
      state.phase = IterPhase::subtracting;
      row.sign_bits = sign_string(state.counts);
      break;
    case IterPhase::subtracting: {
      row.phase = "subtract";
      row.sign_bits = sign_string(state.counts);
      const SubtractionCycle cyc = subtraction_cycle(state.counts);
      row.or_word = cyc.or_word;
      row.lod = cyc.lod;
      state.last_non_negative = cyc.encoder;
      if (cyc.all_negative_after) {
        state.phase = IterPhase::done;
        state.output_valid = true;
        state.output = *state.last_non_negative;
        row.output = state.output;
      }
      break;
    }
  }
  ++state.cycle;
  if (trace != nullptr && *trace) {
    row.cycle = state.cycle;
    (*trace)(row);
  }
  return state;
}

MajorityResult run_iterative(const VoteVector& votes, const MajorityTraceSink* trace) {
  IterMajorityState st = start_iterative(votes);
  while (st.phase != IterPhase::done) st = step_iterative(std::move(st), trace);
  return {st.output, st.cycle};
}

ClassLabel oracle_majority(const VoteVector& votes) {
  std::vector<std::uint32_t> hist(votes.num_classes(), 0);
  for (ClassLabel v : votes.votes()) ++hist[v];
  ClassLabel best = 0;
  for (ClassLabel j = 1; j < hist.size(); ++j) {
    if (hist[j] >= hist[best]) best = j;
  }
  return best;
}

namespace {

void require_inputs(std::uint32_t num_inputs) {
  if (num_inputs < 2) {
    throw std::invalid_argument("majority cycle formulas need T >= 2, got " +
                                std::to_string(num_inputs));
  }
}

}  // namespace

Cycles n_iter_min(std::uint32_t t) {
  require_inputs(t);
  return ceil_log2(t) + 3;
}

Cycles n_iter_max(std::uint32_t t) {
  require_inputs(t);
  return ceil_log2(t) + floor_log2(t) + 2;
}

Cycles n_pipe(std::uint32_t t) {
  require_inputs(t);
  return ceil_log2(t) + floor_log2(t) + 1;
}

Cycles issue_interval(std::uint32_t t) {
  require_inputs(t);
  return ceil_log2(t) + 1;
}

Cycles worst_iterative_latency(std::uint32_t t) {
  require_inputs(t);
  return ceil_log2(t) + 2 + floor_log2(std::uint64_t{t} + 1);
}

bool exceeds_iter_max_bound(std::uint32_t t) {
  return worst_iterative_latency(t) > n_iter_max(t);
}

}  // namespace rfhw
