#pragma once

#include <bit>
#include <cstdint>

namespace primscope {

/// Round an f32 value to bfloat16 precision (8-bit exponent, 7-bit mantissa)
/// and widen back to f32: round-to-nearest-even on the dropped 16 bits.
/// +-0 and +-Inf pass through; NaN stays NaN (payload preserved).
inline float round_bf16(float v) {
  std::uint32_t bits = std::bit_cast<std::uint32_t>(v);
  if ((bits & 0x7F800000u) == 0x7F800000u) return v;  // Inf or NaN
  bits += 0x7FFFu + ((bits >> 16) & 1u);
  bits &= 0xFFFF0000u;
  return std::bit_cast<float>(bits);
}

/// The 16 bits a bf16 store would keep (after the same rounding).
inline std::uint16_t bf16_bits(float v) {
  return static_cast<std::uint16_t>(std::bit_cast<std::uint32_t>(round_bf16(v)) >> 16);
}

}  // namespace primscope
