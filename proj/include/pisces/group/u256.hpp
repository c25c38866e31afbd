// Raw 4x64-bit limb arithmetic helpers shared by the two Montgomery fields.
#pragma once

#include <array>
#include <cstdint>
#include <cstddef>

namespace pisces::group {

using u64 = std::uint64_t;
using u128 = unsigned __int128;
using Limbs4 = std::array<u64, 4>;  // little-endian limbs

constexpr bool add4(Limbs4& a, const Limbs4& b) {
  u64 carry = 0;
  for (int i = 0; i < 4; ++i) {
    u128 t = static_cast<u128>(a[i]) + b[i] + carry;
    a[i] = static_cast<u64>(t);
    carry = static_cast<u64>(t >> 64);
  }
  return carry != 0;
}

constexpr bool sub4(Limbs4& a, const Limbs4& b) {
  u64 borrow = 0;
  for (int i = 0; i < 4; ++i) {
    u128 t = static_cast<u128>(a[i]) - b[i] - borrow;
    a[i] = static_cast<u64>(t);
    borrow = static_cast<u64>((t >> 64) & 1);
  }
  return borrow != 0;
}

constexpr int cmp4(const Limbs4& a, const Limbs4& b) {
  for (int i = 3; i >= 0; --i) {
    if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
  }
  return 0;
}

constexpr bool is_zero4(const Limbs4& a) {
  return (a[0] | a[1] | a[2] | a[3]) == 0;
}

// -x^{-1} mod 2^64 for odd x (Newton iteration).
constexpr u64 neg_inv64(u64 x) {
  u64 inv = 1;
  for (int i = 0; i < 6; ++i) inv *= 2 - x * inv;
  return ~inv + 1;  // -inv
}

// BE byte conversion (32 bytes <-> 4 limbs).
constexpr Limbs4 limbs_from_be(const std::uint8_t* in) {
  Limbs4 out{};
  for (int i = 0; i < 4; ++i) {
    u64 limb = 0;
    for (int j = 0; j < 8; ++j) limb = (limb << 8) | in[(3 - i) * 8 + j];
    out[i] = limb;
  }
  return out;
}

constexpr void limbs_to_be(const Limbs4& in, std::uint8_t* out) {
  for (int i = 0; i < 4; ++i) {
    u64 limb = in[3 - i];
    for (int j = 0; j < 8; ++j) out[i * 8 + j] = static_cast<std::uint8_t>(limb >> (8 * (7 - j)));
  }
}

}  // namespace pisces::group
