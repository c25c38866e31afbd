#include "pisces/group/curve.hpp"

#include <array>
#include <cassert>
#include <cstring>

namespace pisces::group {
namespace {

int hex_nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

Fp fp_from_hex(const char* hex) {
  std::array<std::uint8_t, 32> buf{};
  for (int i = 0; i < 32; ++i) {
    const int hi = hex_nibble(hex[2 * i]);
    const int lo = hex_nibble(hex[2 * i + 1]);
    assert(hi >= 0 && lo >= 0);
    buf[static_cast<size_t>(i)] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  auto v = Fp::from_bytes(std::span<const std::uint8_t, 32>(buf));
  assert(v.has_value());
  return *v;
}

}  // namespace

std::vector<int8_t> wnaf4(std::span<const u64> k) {
  // copy into a mutable little-endian buffer
  std::vector<u64> v(k.begin(), k.end());
  auto is_zero = [&] {
    for (u64 w : v)
      if (w != 0) return false;
    return true;
  };
  auto shr1 = [&] {
    u64 carry = 0;
    for (size_t i = v.size(); i-- > 0;) {
      const u64 nc = v[i] & 1;
      v[i] = (v[i] >> 1) | (carry << 63);
      carry = nc;
    }
  };
  auto sub_small = [&](u64 x) {  // v -= x (x fits in one limb, v >= x)
    u64 borrow = x;
    for (size_t i = 0; i < v.size() && borrow; ++i) {
      const u64 old = v[i];
      v[i] = old - borrow;
      borrow = (old < borrow) ? 1 : 0;
    }
  };
  auto add_small = [&](u64 x) {
    u64 carry = x;
    for (size_t i = 0; i < v.size() && carry; ++i) {
      const u64 old = v[i];
      v[i] = old + carry;
      carry = (v[i] < old) ? 1 : 0;
    }
    if (carry) v.push_back(carry);
  };

  std::vector<int8_t> digits;  // little-endian while building
  while (!is_zero()) {
    int8_t d = 0;
    if (v[0] & 1) {
      const int m = static_cast<int>(v[0] & 15);  // mod 2^4
      d = static_cast<int8_t>(m < 8 ? m : m - 16);
      if (d > 0) sub_small(static_cast<u64>(d));
      else add_small(static_cast<u64>(-d));
    }
    digits.push_back(d);
    shr1();
  }
  std::vector<int8_t> out(digits.rbegin(), digits.rend());
  return out;
}

const Fp& g1_b() {
  static const Fp b = Fp::from_u64(3);
  return b;
}

const Fp2& g2_b() {
  // 3 / (9 + i): the twist coefficient for y^2 = x^3 + b'
  static const Fp2 b = [] {
    Fp2 xi{Fp::from_u64(9), Fp::from_u64(1)};
    return Fp2::from_fp(Fp::from_u64(3)) * xi.inverse();
  }();
  return b;
}

const G1Affine& g1_gen() {
  static const G1Affine g{Fp::from_u64(1), Fp::from_u64(2)};
  return g;
}

const G2Affine& g2_gen() {
  static const G2Affine g = [] {
    const Fp2 x{
        fp_from_hex("1800deef121f1e76426a00665e5c4479674322d4f75edadd46debd5cd992f6ed"),
        fp_from_hex("198e9393920d483a7260bfb731fb5d25f1aa493335a9e71297e485b7aef312c2")};
    const Fp2 y{
        fp_from_hex("12c85ea5db8c6deb4aab71808dcb408fe3d1e7690c43d37b4ce6cc0166fa7daa"),
        fp_from_hex("090689d0585ff075ec9e99ad690c3395bc4b313370b38ef355acdadcd122975b")};
    return G2Affine{x, y};
  }();
  return g;
}

bool g1_on_curve(const G1Affine& a) {
  if (a.inf) return true;
  return a.y.square() == a.x.square() * a.x + g1_b();
}

bool g2_on_curve(const G2Affine& a) {
  if (a.inf) return true;
  return a.y.square() == a.x.square() * a.x + g2_b();
}

bool g2_in_subgroup(const G2Affine& a) {
  if (a.inf) return true;
  const auto& order = FrTag::modulus;
  return G2::from_affine(a)
      .mul_limbs(std::span<const u64>(order.data(), 4))
      .is_infinity();
}

void g1_to_bytes(const G1Affine& a, std::uint8_t out[32]) {
  std::memset(out, 0, 32);
  if (a.inf) return;
  a.x.to_bytes(out);
  out[0] |= 0x80;
  if (a.y.is_odd()) out[0] |= 0x40;
}

void g2_to_bytes(const G2Affine& a, std::uint8_t out[64]) {
  std::memset(out, 0, 64);
  if (a.inf) return;
  a.x.c1.to_bytes(out);
  a.x.c0.to_bytes(out + 32);
  out[0] |= 0x80;
  // parity of y: low coefficient unless it is zero
  const bool odd = a.y.c0.is_zero() ? a.y.c1.is_odd() : a.y.c0.is_odd();
  if (odd) out[0] |= 0x40;
}

std::optional<G1Affine> g1_from_bytes(std::span<const std::uint8_t, 32> in) {
  std::array<std::uint8_t, 32> buf;
  std::memcpy(buf.data(), in.data(), 32);
  const std::uint8_t flags = buf[0] & 0xc0;
  buf[0] &= 0x3f;
  if (!(flags & 0x80)) {
    // only the all-zero string encodes the identity
    for (std::uint8_t b : buf)
      if (b != 0) return std::nullopt;
    if (flags != 0) return std::nullopt;
    return G1Affine::infinity();
  }
  const auto x = Fp::from_bytes(std::span<const std::uint8_t, 32>(buf));
  if (!x) return std::nullopt;
  const auto y = (x->square() * *x + g1_b()).sqrt();
  if (!y) return std::nullopt;
  Fp yy = *y;
  if (yy.is_odd() != ((flags & 0x40) != 0)) yy = -yy;
  return G1Affine{*x, yy};
}

std::optional<G2Affine> g2_from_bytes(std::span<const std::uint8_t, 64> in) {
  std::array<std::uint8_t, 64> buf;
  std::memcpy(buf.data(), in.data(), 64);
  const std::uint8_t flags = buf[0] & 0xc0;
  buf[0] &= 0x3f;
  if (!(flags & 0x80)) {
    for (std::uint8_t b : buf)
      if (b != 0) return std::nullopt;
    if (flags != 0) return std::nullopt;
    return G2Affine::infinity();
  }
  const auto xc1 = Fp::from_bytes(std::span<const std::uint8_t, 32>(buf.data(), 32));
  const auto xc0 = Fp::from_bytes(std::span<const std::uint8_t, 32>(buf.data() + 32, 32));
  if (!xc0 || !xc1) return std::nullopt;
  const Fp2 x{*xc0, *xc1};
  const auto y = (x.square() * x + g2_b()).sqrt();
  if (!y) return std::nullopt;
  Fp2 yy = *y;
  const bool odd = yy.c0.is_zero() ? yy.c1.is_odd() : yy.c0.is_odd();
  if (odd != ((flags & 0x40) != 0)) yy = -yy;
  const G2Affine a{x, yy};
  if (!g2_in_subgroup(a)) return std::nullopt;
  return a;
}

G1 msm(std::span<const G1Affine> points, std::span<const Fr> scalars) {
  assert(points.size() == scalars.size());
  G1 acc = G1::infinity();
  for (size_t i = 0; i < points.size(); ++i)
    acc = acc.add(G1::from_affine(points[i]).mul(scalars[i]));
  return acc;
}

G2 msm_g2(std::span<const G2Affine> points, std::span<const Fr> scalars) {
  assert(points.size() == scalars.size());
  G2 acc = G2::infinity();
  for (size_t i = 0; i < points.size(); ++i)
    acc = acc.add(G2::from_affine(points[i]).mul(scalars[i]));
  return acc;
}

}  // namespace pisces::group
