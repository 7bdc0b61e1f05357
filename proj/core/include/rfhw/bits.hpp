#pragma once

#include <bit>
#include <cstdint>

namespace rfhw {

using Cycles = std::uint64_t;

// ceil(log2(n)) for n >= 1.
constexpr std::uint32_t ceil_log2(std::uint64_t n) noexcept {
  return n <= 1 ? 0u : static_cast<std::uint32_t>(std::bit_width(n - 1));
}

// floor(log2(n)) for n >= 1.
constexpr std::uint32_t floor_log2(std::uint64_t n) noexcept {
  return n == 0 ? 0u : static_cast<std::uint32_t>(std::bit_width(n) - 1);
}

constexpr std::uint64_t low_mask(std::uint32_t width) noexcept {
  return width >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
}

static_assert(ceil_log2(40) == 6 && floor_log2(40) == 5);
static_assert(ceil_log2(2) == 1 && floor_log2(2) == 1);
static_assert(ceil_log2(41) == 6 && ceil_log2(64) == 6 && ceil_log2(65) == 7);

}  // namespace rfhw
