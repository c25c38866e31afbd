// Internal byte-level helpers shared by the statement/proof serializers and
// the proving engine. Big-endian integers, canonical group encodings.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pisces/group/curve.hpp"

namespace pisces::zk::wire {

// clause tag bytes, shared between statements and proofs
inline constexpr std::uint8_t kTagOpening = 1;
inline constexpr std::uint8_t kTagEqual = 2;
inline constexpr std::uint8_t kTagLinear = 3;
inline constexpr std::uint8_t kTagPublic = 4;
inline constexpr std::uint8_t kTagProduct = 5;
inline constexpr std::uint8_t kTagRange = 6;
inline constexpr std::uint8_t kTagSigPoK = 7;

inline void put_u8(std::vector<std::uint8_t>& out, std::uint8_t v) { out.push_back(v); }

inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
}

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 3; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_fr(std::vector<std::uint8_t>& out, const group::Fr& s) {
  std::uint8_t buf[32];
  s.to_bytes(buf);
  out.insert(out.end(), buf, buf + 32);
}

inline void put_g1(std::vector<std::uint8_t>& out, const group::G1Affine& p) {
  std::uint8_t buf[32];
  group::g1_to_bytes(p, buf);
  out.insert(out.end(), buf, buf + 32);
}

// Sequential strict reader; any overrun or decode failure latches `fail`.
struct Reader {
  std::span<const std::uint8_t> in;
  std::size_t pos = 0;
  bool fail = false;

  const std::uint8_t* take(std::size_t n) {
    if (fail || in.size() - pos < n) {
      fail = true;
      return nullptr;
    }
    const std::uint8_t* p = in.data() + pos;
    pos += n;
    return p;
  }

  std::uint8_t u8() {
    const std::uint8_t* p = take(1);
    return p ? *p : 0;
  }

  std::uint16_t u16() {
    const std::uint8_t* p = take(2);
    return p ? static_cast<std::uint16_t>((p[0] << 8) | p[1]) : 0;
  }

  bool fr(group::Fr* out) {
    const std::uint8_t* p = take(32);
    if (!p) return false;
    auto s = group::Fr::from_bytes(std::span<const std::uint8_t, 32>(p, 32));
    if (!s) {
      fail = true;
      return false;
    }
    *out = *s;
    return true;
  }

  bool done() const { return !fail && pos == in.size(); }
};

}  // namespace pisces::zk::wire
