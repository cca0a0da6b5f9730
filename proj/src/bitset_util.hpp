#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace selest::detail {

inline std::vector<int> mask_bits(uint32_t mask) {
  std::vector<int> out;
  out.reserve(std::popcount(mask));
  while (mask) {
    out.push_back(std::countr_zero(mask));
    mask &= mask - 1;
  }
  return out;
}

// Compress the bits of `full` selected by `scope` into a dense low-order
// index, preserving ascending bit order.
inline uint32_t pack_assignment(uint32_t full, uint32_t scope) {
  uint32_t packed = 0;
  int out = 0;
  while (scope) {
    int b = std::countr_zero(scope);
    if (full & (1u << b)) packed |= 1u << out;
    ++out;
    scope &= scope - 1;
  }
  return packed;
}

// Inverse of pack_assignment: spread the low bits of `packed` onto the set
// bits of `scope`.
inline uint32_t unpack_assignment(uint32_t packed, uint32_t scope) {
  uint32_t full = 0;
  int in = 0;
  while (scope) {
    int b = std::countr_zero(scope);
    if (packed & (1u << in)) full |= 1u << b;
    ++in;
    scope &= scope - 1;
  }
  return full;
}

}  // namespace selest::detail
