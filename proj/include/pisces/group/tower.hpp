// Extension-field tower over the BN254 base field:
//   Fp2  = Fp[i]/(i^2 + 1)
//   Fp6  = Fp2[v]/(v^3 - xi),  xi = 9 + i
//   Fp12 = Fp6[w]/(w^2 - v)
#pragma once

#include <optional>

#include "pisces/group/field.hpp"

namespace pisces::group {

struct Fp2 {
  Fp c0, c1;  // c0 + c1*i

  constexpr Fp2() = default;
  constexpr Fp2(const Fp& a, const Fp& b) : c0(a), c1(b) {}
  static constexpr Fp2 zero() { return {}; }
  static constexpr Fp2 one() { return {Fp::one(), Fp::zero()}; }
  static constexpr Fp2 from_fp(const Fp& a) { return {a, Fp::zero()}; }

  constexpr bool is_zero() const { return c0.is_zero() && c1.is_zero(); }
  constexpr bool operator==(const Fp2&) const = default;

  constexpr Fp2 operator+(const Fp2& o) const { return {c0 + o.c0, c1 + o.c1}; }
  constexpr Fp2 operator-(const Fp2& o) const { return {c0 - o.c0, c1 - o.c1}; }
  constexpr Fp2 operator-() const { return {-c0, -c1}; }
  constexpr Fp2& operator+=(const Fp2& o) { return *this = *this + o; }
  constexpr Fp2& operator-=(const Fp2& o) { return *this = *this - o; }

  constexpr Fp2 operator*(const Fp2& o) const {
    const Fp t0 = c0 * o.c0;
    const Fp t1 = c1 * o.c1;
    return {t0 - t1, (c0 + c1) * (o.c0 + o.c1) - t0 - t1};
  }
  constexpr Fp2& operator*=(const Fp2& o) { return *this = *this * o; }

  constexpr Fp2 mul_fp(const Fp& s) const { return {c0 * s, c1 * s}; }

  constexpr Fp2 square() const {
    const Fp a = c0 + c1;
    const Fp b = c0 - c1;
    return {a * b, (c0 * c1).dbl()};
  }

  constexpr Fp2 dbl() const { return {c0.dbl(), c1.dbl()}; }
  constexpr Fp2 conjugate() const { return {c0, -c1}; }

  // (9 + i) * this
  constexpr Fp2 mul_xi() const {
    const Fp a = c0.dbl().dbl().dbl() + c0;  // 9*c0
    const Fp b = c1.dbl().dbl().dbl() + c1;
    return {a - c1, b + c0};
  }

  constexpr Fp2 inverse() const {
    const Fp norm_inv = (c0.square() + c1.square()).inverse();
    return {c0 * norm_inv, -(c1 * norm_inv)};
  }

  Fp2 pow(std::span<const u64> exp) const {
    Fp2 acc = one();
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

  // Complex square root (p = 3 mod 4); nullopt when not a QR.
  std::optional<Fp2> sqrt() const {
    if (is_zero()) return zero();
    if (c1.is_zero()) {
      if (auto s = c0.sqrt()) return Fp2{*s, Fp::zero()};
      auto s = (-c0).sqrt();
      if (!s) return std::nullopt;
      return Fp2{Fp::zero(), *s};
    }
    const Fp norm = c0.square() + c1.square();
    auto alpha = norm.sqrt();
    if (!alpha) return std::nullopt;
    const Fp half = Fp::from_u64(2).inverse();
    Fp delta = (c0 + *alpha) * half;
    auto x0 = delta.sqrt();
    if (!x0) {
      delta = (c0 - *alpha) * half;
      x0 = delta.sqrt();
      if (!x0) return std::nullopt;
    }
    const Fp x1 = c1 * (x0->dbl()).inverse();
    Fp2 cand{*x0, x1};
    if (cand.square() != *this) return std::nullopt;
    return cand;
  }

  bool is_odd() const { return c0.is_zero() ? c1.is_odd() : c0.is_odd(); }
};

struct Fp6 {
  Fp2 c0, c1, c2;  // c0 + c1*v + c2*v^2

  constexpr Fp6() = default;
  constexpr Fp6(const Fp2& a, const Fp2& b, const Fp2& c) : c0(a), c1(b), c2(c) {}
  static constexpr Fp6 zero() { return {}; }
  static constexpr Fp6 one() { return {Fp2::one(), Fp2::zero(), Fp2::zero()}; }

  constexpr bool is_zero() const { return c0.is_zero() && c1.is_zero() && c2.is_zero(); }
  constexpr bool operator==(const Fp6&) const = default;

  constexpr Fp6 operator+(const Fp6& o) const { return {c0 + o.c0, c1 + o.c1, c2 + o.c2}; }
  constexpr Fp6 operator-(const Fp6& o) const { return {c0 - o.c0, c1 - o.c1, c2 - o.c2}; }
  constexpr Fp6 operator-() const { return {-c0, -c1, -c2}; }
  constexpr Fp6& operator+=(const Fp6& o) { return *this = *this + o; }
  constexpr Fp6& operator-=(const Fp6& o) { return *this = *this - o; }

  constexpr Fp6 operator*(const Fp6& o) const {
    const Fp2 t0 = c0 * o.c0;
    const Fp2 t1 = c1 * o.c1;
    const Fp2 t2 = c2 * o.c2;
    const Fp2 r0 = t0 + ((c1 + c2) * (o.c1 + o.c2) - t1 - t2).mul_xi();
    const Fp2 r1 = (c0 + c1) * (o.c0 + o.c1) - t0 - t1 + t2.mul_xi();
    const Fp2 r2 = (c0 + c2) * (o.c0 + o.c2) - t0 - t2 + t1;
    return {r0, r1, r2};
  }
  constexpr Fp6& operator*=(const Fp6& o) { return *this = *this * o; }

  constexpr Fp6 square() const { return *this * *this; }

  // this * v
  constexpr Fp6 mul_v() const { return {c2.mul_xi(), c0, c1}; }

  constexpr Fp6 dbl() const { return {c0.dbl(), c1.dbl(), c2.dbl()}; }

  // this * (b0 + b1*v), sparse
  constexpr Fp6 mul_01(const Fp2& b0, const Fp2& b1) const {
    return {c0 * b0 + (c2 * b1).mul_xi(), c0 * b1 + c1 * b0, c1 * b1 + c2 * b0};
  }

  constexpr Fp6 mul_fp2(const Fp2& s) const { return {c0 * s, c1 * s, c2 * s}; }

  constexpr Fp6 inverse() const {
    const Fp2 t0 = c0.square() - (c1 * c2).mul_xi();
    const Fp2 t1 = c2.square().mul_xi() - c0 * c1;
    const Fp2 t2 = c1.square() - c0 * c2;
    const Fp2 d = (c0 * t0 + ((c2 * t1 + c1 * t2).mul_xi())).inverse();
    return {t0 * d, t1 * d, t2 * d};
  }
};

struct Fp12 {
  Fp6 c0, c1;  // c0 + c1*w

  constexpr Fp12() = default;
  constexpr Fp12(const Fp6& a, const Fp6& b) : c0(a), c1(b) {}
  static constexpr Fp12 one() { return {Fp6::one(), Fp6::zero()}; }

  constexpr bool operator==(const Fp12&) const = default;
  constexpr bool is_one() const { return *this == one(); }

  constexpr Fp12 operator*(const Fp12& o) const {
    const Fp6 t0 = c0 * o.c0;
    const Fp6 t1 = c1 * o.c1;
    return {t0 + t1.mul_v(), (c0 + c1) * (o.c0 + o.c1) - t0 - t1};
  }
  constexpr Fp12& operator*=(const Fp12& o) { return *this = *this * o; }

  constexpr Fp12 square() const {
    const Fp6 t0 = c0 * c1;
    return {(c0 + c1) * (c0 + c1.mul_v()) - t0 - t0.mul_v(), t0.dbl()};
  }

  // Multiply by the sparse line value  c + (b + a*v)*w  with a, b, c in Fp2.
  constexpr Fp12 mul_line(const Fp2& a, const Fp2& b, const Fp2& c) const {
    const Fp6 t1 = c1.mul_01(b, a);          // c1 * (b + a*v)
    const Fp6 t3 = c0.mul_fp2(c);            // c0 * c
    const Fp6 r0 = t3 + t1.mul_v();
    const Fp6 r1 = (c1 + c0).mul_01(b + c, a) - t1 - t3;
    return {r0, r1};
  }

  // p^6-Frobenius: conjugation in the quadratic extension over Fp6.
  constexpr Fp12 conjugate() const { return {c0, -c1}; }

  constexpr Fp12 inverse() const {
    const Fp6 d = (c0 * c0 - (c1 * c1).mul_v()).inverse();
    return {c0 * d, -(c1 * d)};
  }

  Fp12 pow(std::span<const u64> exp) const {
    Fp12 acc = one();
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

  Fp12 pow_u64(u64 e) const {
    const u64 limbs[1] = {e};
    return pow(std::span<const u64>(limbs, 1));
  }

  // Frobenius maps; coefficient tables live in pairing.cpp.
  Fp12 frobenius() const;
  Fp12 frobenius_p2() const;
  Fp12 frobenius_p3() const;
};

}  // namespace pisces::group
