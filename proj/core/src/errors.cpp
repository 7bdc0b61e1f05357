#include "rfhw/errors.hpp"

namespace rfhw {

const char* to_string(FormatErrc code) noexcept {
  switch (code) {
    case FormatErrc::open_failed: return "open failed";
    case FormatErrc::bad_magic: return "bad magic";
    case FormatErrc::bad_version: return "unsupported version";
    case FormatErrc::truncated: return "truncated";
    case FormatErrc::trailing_bytes: return "trailing bytes";
    case FormatErrc::dimension_mismatch: return "dimension mismatch";
    case FormatErrc::out_of_range: return "value out of range";
    case FormatErrc::malformed_line: return "malformed line";
    case FormatErrc::address_gap: return "address gap";
    case FormatErrc::write_failed: return "write failed";
  }
  return "unknown";
}

FormatError::FormatError(FormatErrc code, std::string source, std::uint64_t offset,
                         const std::string& detail)
    : std::runtime_error(source + ": " + to_string(code) + " at " +
                         std::to_string(offset) + ": " + detail),
      code_(code),
      source_(std::move(source)),
      offset_(offset) {}

}  // namespace rfhw
