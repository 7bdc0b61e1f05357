#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rfhw {

// Raised when a state machine is driven outside its protocol, e.g. stepping a
// finished unit or issuing into a busy subtractor.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Raised when a datapath value exceeds its declared register width. Never a
// consequence of valid input; indicates a bug in the width plan.
class WidthOverflow : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class FormatErrc {
  open_failed,
  bad_magic,
  bad_version,
  truncated,
  trailing_bytes,
  dimension_mismatch,
  out_of_range,
  malformed_line,
  address_gap,
  write_failed,
};

const char* to_string(FormatErrc code) noexcept;

// Parser / serializer failure. `offset` is the byte offset (binary formats) or
// the 1-based line number (text formats) where the problem was detected.
class FormatError : public std::runtime_error {
 public:
  FormatError(FormatErrc code, std::string source, std::uint64_t offset,
              const std::string& detail);

  FormatErrc code() const noexcept { return code_; }
  const std::string& source() const noexcept { return source_; }
  std::uint64_t offset() const noexcept { return offset_; }

 private:
  FormatErrc code_;
  std::string source_;
  std::uint64_t offset_;
};

}  // namespace rfhw
