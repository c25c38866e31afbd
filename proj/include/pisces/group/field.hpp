// Generic 254-bit prime field in Montgomery form (CIOS multiplication).
// Instantiated for the BN254 base field Fp and scalar field Fr.
#pragma once

#include <cstring>
#include <optional>
#include <span>

#include "pisces/group/u256.hpp"

namespace pisces::group {

template <typename Tag>
class Fq {
 public:
  static constexpr Limbs4 MOD = Tag::modulus;
  static constexpr u64 INV = neg_inv64(MOD[0]);

  constexpr Fq() : v_{} {}

  static constexpr Fq zero() { return Fq{}; }
  static constexpr Fq one() { return from_limbs_raw(R); }

  static constexpr Fq from_u64(u64 x) { return to_mont(Limbs4{x, 0, 0, 0}); }

  // Value already reduced mod MOD, standard form.
  static constexpr Fq from_limbs(const Limbs4& standard) { return to_mont(standard); }

  // Arbitrary 256-bit value, reduced mod MOD first.
  static constexpr Fq from_limbs_any(Limbs4 x) {
    while (cmp4(x, MOD) >= 0) sub4(x, MOD);
    return to_mont(x);
  }

  // Strict decode: reject non-canonical (>= MOD) encodings.
  static std::optional<Fq> from_bytes(std::span<const std::uint8_t, 32> in) {
    Limbs4 x = limbs_from_be(in.data());
    if (cmp4(x, MOD) >= 0) return std::nullopt;
    return to_mont(x);
  }

  // 64-byte big-endian value reduced mod MOD (negligible bias).
  static Fq from_bytes_wide(std::span<const std::uint8_t, 64> in) {
    Limbs4 hi = limbs_from_be(in.data());
    Limbs4 lo = limbs_from_be(in.data() + 32);
    // hi*2^256 + lo, with R = 2^256 mod MOD
    return from_limbs_any(hi) * from_limbs_raw(mont_mul(R, R2)) + from_limbs_any(lo);
  }

  constexpr Limbs4 to_limbs() const { return mont_mul(v_, Limbs4{1, 0, 0, 0}); }

  void to_bytes(std::uint8_t out[32]) const { limbs_to_be(to_limbs(), out); }

  constexpr bool is_zero() const { return is_zero4(v_); }
  constexpr bool operator==(const Fq& o) const { return v_ == o.v_; }
  constexpr bool operator!=(const Fq& o) const { return v_ != o.v_; }

  constexpr Fq operator+(const Fq& o) const {
    Limbs4 t = v_;
    add4(t, o.v_);  // both < MOD < 2^255: no carry out of 256 bits
    if (cmp4(t, MOD) >= 0) sub4(t, MOD);
    return from_limbs_raw(t);
  }

  constexpr Fq operator-(const Fq& o) const {
    Limbs4 t = v_;
    if (sub4(t, o.v_)) add4(t, MOD);
    return from_limbs_raw(t);
  }

  constexpr Fq operator-() const {
    if (is_zero()) return *this;
    Limbs4 t = MOD;
    sub4(t, v_);
    return from_limbs_raw(t);
  }

  constexpr Fq operator*(const Fq& o) const { return from_limbs_raw(mont_mul(v_, o.v_)); }

  constexpr Fq& operator+=(const Fq& o) { return *this = *this + o; }
  constexpr Fq& operator-=(const Fq& o) { return *this = *this - o; }
  constexpr Fq& operator*=(const Fq& o) { return *this = *this * o; }

  constexpr Fq square() const { return *this * *this; }

  constexpr Fq dbl() const { return *this + *this; }

  // Exponent given as little-endian limbs; not constant time.
  constexpr Fq pow(std::span<const u64> exp) const {
    Fq acc = one();
    bool started = false;
    for (int i = static_cast<int>(exp.size()) - 1; i >= 0; --i) {
      for (int b = 63; b >= 0; --b) {
        if (started) acc = acc.square();
        if ((exp[i] >> b) & 1) {
          if (started) {
            acc *= *this;
          } else {
            acc = *this;
            started = true;
          }
        }
      }
    }
    return acc;
  }

  constexpr Fq pow(const Limbs4& exp) const { return pow(std::span<const u64>(exp.data(), 4)); }

  constexpr Fq inverse() const {  // Fermat; MOD prime
    Limbs4 e = MOD;
    e[0] -= 2;  // MOD is odd with MOD[0] >= 2 for both fields
    return pow(e);
  }

  // Square root for MOD = 3 mod 4; nullopt if not a QR.
  std::optional<Fq> sqrt() const {
    Limbs4 e = MOD;
    e[0] += 1;  // MOD+1: MOD[0] odd and < 2^64-1, no carry beyond limb 0 for our moduli
    // shift right by 2: (MOD+1)/4
    for (int i = 0; i < 4; ++i) {
      e[i] >>= 2;
      if (i < 3) e[i] |= e[i + 1] << 62;
    }
    Fq cand = pow(e);
    if (cand.square() != *this) return std::nullopt;
    return cand;
  }

  bool is_odd() const { return to_limbs()[0] & 1; }

 private:
  Limbs4 v_;  // Montgomery form: value * 2^256 mod MOD

  static constexpr Fq from_limbs_raw(const Limbs4& mont) {
    Fq f;
    f.v_ = mont;
    return f;
  }

  static constexpr Limbs4 compute_r() {  // 2^256 mod MOD
    Limbs4 a{1, 0, 0, 0};
    for (int i = 0; i < 256; ++i) {
      add4(a, a);  // MOD < 2^255 so a < 2^255 and doubling never carries out
      if (cmp4(a, MOD) >= 0) sub4(a, MOD);
    }
    return a;
  }

  static constexpr Limbs4 compute_r2() {  // 2^512 mod MOD
    Limbs4 a = compute_r();
    for (int i = 0; i < 256; ++i) {
      add4(a, a);
      if (cmp4(a, MOD) >= 0) sub4(a, MOD);
    }
    return a;
  }

 public:
  static constexpr Limbs4 R = compute_r();
  static constexpr Limbs4 R2 = compute_r2();

 private:
  static constexpr Fq to_mont(const Limbs4& standard) {
    return from_limbs_raw(mont_mul(standard, R2));
  }

  static constexpr Limbs4 mont_mul(const Limbs4& a, const Limbs4& b) {
    u64 t[6] = {0, 0, 0, 0, 0, 0};
    for (int i = 0; i < 4; ++i) {
      u64 carry = 0;
      for (int j = 0; j < 4; ++j) {
        u128 x = static_cast<u128>(a[i]) * b[j] + t[j] + carry;
        t[j] = static_cast<u64>(x);
        carry = static_cast<u64>(x >> 64);
      }
      u128 x = static_cast<u128>(t[4]) + carry;
      t[4] = static_cast<u64>(x);
      t[5] = static_cast<u64>(x >> 64);

      const u64 m = t[0] * INV;
      u128 y = static_cast<u128>(m) * MOD[0] + t[0];
      carry = static_cast<u64>(y >> 64);
      for (int j = 1; j < 4; ++j) {
        y = static_cast<u128>(m) * MOD[j] + t[j] + carry;
        t[j - 1] = static_cast<u64>(y);
        carry = static_cast<u64>(y >> 64);
      }
      y = static_cast<u128>(t[4]) + carry;
      t[3] = static_cast<u64>(y);
      t[4] = t[5] + static_cast<u64>(y >> 64);
      t[5] = 0;
    }
    Limbs4 out{t[0], t[1], t[2], t[3]};
    if (t[4] != 0 || cmp4(out, MOD) >= 0) sub4(out, MOD);
    return out;
  }
};

struct FpTag {
  static constexpr Limbs4 modulus = {0x3c208c16d87cfd47ULL, 0x97816a916871ca8dULL,
                                     0xb85045b68181585dULL, 0x30644e72e131a029ULL};
};

struct FrTag {
  static constexpr Limbs4 modulus = {0x43e1f593f0000001ULL, 0x2833e84879b97091ULL,
                                     0xb85045b68181585dULL, 0x30644e72e131a029ULL};
};

using Fp = Fq<FpTag>;
using Fr = Fq<FrTag>;

}  // namespace pisces::group
