#pragma once

// Bit-accurate model of the logarithmic-depth majority-vote block: one-hot
// decode, K parallel registered adder trees, two's-complement class-count
// registers and the OR / leading-one-detector subtraction loop.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rfhw/bits.hpp"

namespace rfhw {

using ClassLabel = std::uint32_t;

// T class labels in [0, K). T >= 2 and K >= 2 are enforced here so the
// datapath never has to special-case degenerate sizes.
class VoteVector {
 public:
  VoteVector(std::vector<ClassLabel> votes, std::uint32_t num_classes);

  std::span<const ClassLabel> votes() const noexcept { return votes_; }
  std::uint32_t num_inputs() const noexcept {
    return static_cast<std::uint32_t>(votes_.size());
  }
  std::uint32_t num_classes() const noexcept { return num_classes_; }
  ClassLabel operator[](std::size_t i) const noexcept { return votes_[i]; }

 private:
  std::vector<ClassLabel> votes_;
  std::uint32_t num_classes_;
};

// T rows of K bits, row-major.
class OneHotMatrix {
 public:
  OneHotMatrix(std::uint32_t rows, std::uint32_t cols);

  std::uint32_t rows() const noexcept { return rows_; }
  std::uint32_t cols() const noexcept { return cols_; }
  bool at(std::uint32_t row, std::uint32_t col) const noexcept {
    return bits_[std::size_t{row} * cols_ + col] != 0;
  }
  void set(std::uint32_t row, std::uint32_t col) noexcept {
    bits_[std::size_t{row} * cols_ + col] = 1;
  }
  std::uint32_t column_sum(std::uint32_t col) const noexcept;

 private:
  std::uint32_t rows_;
  std::uint32_t cols_;
  std::vector<std::uint8_t> bits_;
};

OneHotMatrix decode_one_hot(const VoteVector& votes);

struct AdderStage {
  std::uint32_t inputs = 0;        // operands entering the stage
  std::uint32_t adders = 0;        // ceil(inputs / 2); an odd operand passes through
  std::uint32_t input_width = 0;   // s + 1 bits
  std::uint32_t output_width = 0;  // s + 2 bits
};

// Shape of one adder tree (all K trees are identical).
class AdderTreePlan {
 public:
  static AdderTreePlan for_inputs(std::uint32_t num_inputs);

  std::uint32_t num_inputs() const noexcept { return num_inputs_; }
  std::uint32_t depth() const noexcept {
    return static_cast<std::uint32_t>(stages_.size());
  }
  std::span<const AdderStage> stages() const noexcept { return stages_; }
  // W = ceil(log2(T + 1)): wide enough for a unanimous count of T.
  std::uint32_t count_width() const noexcept { return count_width_; }

 private:
  std::uint32_t num_inputs_ = 0;
  std::uint32_t count_width_ = 0;
  std::vector<AdderStage> stages_;
};

// Registers of one adder-tree level for all K classes, class-major:
// values[class * operands + i].
struct AdderLevel {
  std::uint32_t operands = 0;
  std::uint32_t width = 0;
  std::vector<std::uint32_t> values;
};

// Operand level 0: the one-hot columns, one bit per operand.
AdderLevel adder_inputs(const OneHotMatrix& onehot);

// Combinational logic of one adder stage followed by its register. Throws
// WidthOverflow if any sum does not fit the stage's output width.
AdderLevel add_stage(const AdderLevel& in, const AdderStage& stage,
                     std::uint32_t num_classes);

// K class-count registers, each W magnitude bits plus a sign bit, stored as
// raw (W+1)-bit two's-complement words.
class ClassCounts {
 public:
  ClassCounts() = default;
  ClassCounts(std::uint32_t num_classes, std::uint32_t magnitude_width);

  // Loads unsigned adder-tree results with a '0' sign bit appended.
  static ClassCounts from_magnitudes(std::span<const std::uint32_t> magnitudes,
                                     std::uint32_t magnitude_width);

  std::uint32_t size() const noexcept {
    return static_cast<std::uint32_t>(words_.size());
  }
  std::uint32_t magnitude_width() const noexcept { return magnitude_width_; }
  std::uint32_t word(std::uint32_t j) const noexcept { return words_[j]; }
  bool sign(std::uint32_t j) const noexcept {
    return ((words_[j] >> magnitude_width_) & 1u) != 0;
  }
  std::uint32_t magnitude(std::uint32_t j) const noexcept {
    return static_cast<std::uint32_t>(words_[j] & low_mask(magnitude_width_));
  }
  std::int64_t value(std::uint32_t j) const noexcept;
  bool all_negative() const noexcept;
  std::uint32_t sign_clear_count() const noexcept;

  // Subtracts `amount` from register j in (W+1)-bit two's complement. Throws
  // WidthOverflow if the exact result is not representable.
  void subtract(std::uint32_t j, std::uint32_t amount);

  friend bool operator==(const ClassCounts&, const ClassCounts&) = default;

 private:
  std::uint32_t magnitude_width_ = 0;
  std::vector<std::uint32_t> words_;
};

struct AdderTreeResult {
  ClassCounts counts;
  Cycles latency = 0;                // one cycle per registered stage
  std::vector<AdderLevel> levels;    // levels[0] = one-hot operands, then one per stage
};

AdderTreeResult compute_class_counts(const OneHotMatrix& onehot,
                                     const AdderTreePlan& plan);

// Leading-one detector: 2^k for the most significant set bit k, or nullopt
// (the zero flag) when the word is 0.
std::optional<std::uint32_t> leading_one(std::uint32_t or_word) noexcept;

// Priority encoder over the sign bits: highest class index whose sign is clear.
std::optional<ClassLabel> highest_sign_clear(const ClassCounts& counts) noexcept;

// Everything one OR/LOD subtraction cycle observes and does.
struct SubtractionCycle {
  std::uint32_t or_word = 0;
  std::optional<std::uint32_t> lod;          // nullopt: zero flag, 1 was subtracted
  std::optional<ClassLabel> encoder;         // value latched by the delayed encoder
  bool all_negative_after = false;
};

// One iteration of the subtraction loop. Sign-set counts are left untouched;
// sign-clear counts lose the LOD value, or 1 when the OR word is zero.
SubtractionCycle subtraction_cycle(ClassCounts& counts);

// One line per clock of the majority block.
struct MajorityTraceRow {
  Cycles cycle = 0;
  std::string phase;
  std::string sign_bits;                     // class K-1 first; empty outside subtraction
  std::optional<std::uint32_t> or_word;
  std::optional<std::uint32_t> lod;
  std::optional<ClassLabel> output;
};
using MajorityTraceSink = std::function<void(const MajorityTraceRow&)>;

// Stable text form: "cycle=<n> phase=<p> signs=<bits|-> or=<n|-> lod=<n|zero|-> out=<n|->"
std::string format_trace_row(const MajorityTraceRow& row);

enum class IterPhase { idle, adding, latched, subtracting, done };
const char* to_string(IterPhase phase) noexcept;

// Single-decision state of the iterative block.
struct IterMajorityState {
  IterPhase phase = IterPhase::idle;
  std::uint32_t adder_stage = 0;      // next stage to evaluate while adding
  std::uint32_t num_classes = 0;
  AdderTreePlan plan;
  AdderLevel partial;                 // adder register contents
  ClassCounts counts;                 // subtractor registers
  Cycles cycle = 0;
  std::optional<ClassLabel> last_non_negative;  // delayed encoder register
  bool output_valid = false;
  ClassLabel output = 0;
};

// Presents `votes` at the input strobe. The returned state is at cycle 0 in
// phase adding(0); the decoder is combinational.
IterMajorityState start_iterative(const VoteVector& votes);

// Advances exactly one clock. Throws ContractViolation on idle or done states.
IterMajorityState step_iterative(IterMajorityState state,
                                 const MajorityTraceSink* trace = nullptr);

struct MajorityResult {
  ClassLabel label = 0;
  Cycles latency = 0;   // clocks from input strobe to output valid, inclusive
};

MajorityResult run_iterative(const VoteVector& votes,
                             const MajorityTraceSink* trace = nullptr);

// Histogram argmax; ties resolve to the highest class index.
ClassLabel oracle_majority(const VoteVector& votes);

// Closed-form cycle counts. All throw std::invalid_argument for T < 2.
Cycles n_iter_min(std::uint32_t num_inputs);
Cycles n_iter_max(std::uint32_t num_inputs);
Cycles n_pipe(std::uint32_t num_inputs);
Cycles issue_interval(std::uint32_t num_inputs);

// Worst measured iterative latency over all inputs: the max count can carry
// floor(log2(T+1)) one bits, one more than n_iter_max assumes when T = 2^k-1.
Cycles worst_iterative_latency(std::uint32_t num_inputs);

// True when worst_iterative_latency exceeds n_iter_max.
bool exceeds_iter_max_bound(std::uint32_t num_inputs);

}  // namespace rfhw
