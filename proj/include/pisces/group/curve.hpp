// Short-Weierstrass curve arithmetic for G1 (over Fp) and G2 (over Fp2),
// Jacobian coordinates, plus canonical compressed encodings.
#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pisces/group/tower.hpp"

namespace pisces::group {

template <typename F>
struct Affine {
  F x{}, y{};
  bool inf = true;

  constexpr Affine() = default;
  constexpr Affine(const F& px, const F& py) : x(px), y(py), inf(false) {}
  static constexpr Affine infinity() { return {}; }

  constexpr bool operator==(const Affine& o) const {
    if (inf || o.inf) return inf == o.inf;
    return x == o.x && y == o.y;
  }
  constexpr Affine neg() const { return inf ? *this : Affine{x, -y}; }
};

// y^2 = x^3 + B; Jacobian (X, Y, Z) with x = X/Z^2, y = Y/Z^3.
template <typename F>
struct Jac {
  F X{}, Y{}, Z{};  // Z == 0 encodes infinity

  constexpr Jac() : Y(F::one()) {}
  constexpr Jac(const F& x, const F& y, const F& z) : X(x), Y(y), Z(z) {}

  static constexpr Jac infinity() { return {}; }
  static constexpr Jac from_affine(const Affine<F>& a) {
    if (a.inf) return infinity();
    return {a.x, a.y, F::one()};
  }

  constexpr bool is_infinity() const { return Z.is_zero(); }

  Jac dbl() const {
    if (is_infinity()) return *this;
    // dbl-2009-l (a = 0)
    const F A = X.square();
    const F B = Y.square();
    const F C = B.square();
    F D = (X + B).square() - A - C;
    D = D.dbl();
    const F E = A.dbl() + A;
    const F Fv = E.square();
    const F X3 = Fv - D.dbl();
    const F Y3 = E * (D - X3) - C.dbl().dbl().dbl();
    const F Z3 = (Y * Z).dbl();
    return {X3, Y3, Z3};
  }

  Jac add(const Jac& o) const {
    if (is_infinity()) return o;
    if (o.is_infinity()) return *this;
    // add-2007-bl
    const F Z1Z1 = Z.square();
    const F Z2Z2 = o.Z.square();
    const F U1 = X * Z2Z2;
    const F U2 = o.X * Z1Z1;
    const F S1 = Y * o.Z * Z2Z2;
    const F S2 = o.Y * Z * Z1Z1;
    const F H = U2 - U1;
    const F Rv = S2 - S1;
    if (H.is_zero()) {
      if (Rv.is_zero()) return dbl();
      return infinity();
    }
    const F I = H.square().dbl().dbl();
    const F J = H * I;
    const F r2 = Rv.dbl();
    const F V = U1 * I;
    const F X3 = r2.square() - J - V.dbl();
    const F Y3 = r2 * (V - X3) - (S1 * J).dbl();
    const F Z3 = ((Z + o.Z).square() - Z1Z1 - Z2Z2) * H;
    return {X3, Y3, Z3};
  }

  Jac add(const Affine<F>& o) const {
    if (o.inf) return *this;
    if (is_infinity()) return from_affine(o);
    // madd-2007-bl (Z2 = 1)
    const F Z1Z1 = Z.square();
    const F U2 = o.x * Z1Z1;
    const F S2 = o.y * Z * Z1Z1;
    const F H = U2 - X;
    const F Rv = S2 - Y;
    if (H.is_zero()) {
      if (Rv.is_zero()) return dbl();
      return infinity();
    }
    const F HH = H.square();
    const F I = HH.dbl().dbl();
    const F J = H * I;
    const F r2 = Rv.dbl();
    const F V = X * I;
    const F X3 = r2.square() - J - V.dbl();
    const F Y3 = r2 * (V - X3) - (Y * J).dbl();
    const F Z3 = (Z + H).square() - Z1Z1 - HH;
    return {X3, Y3, Z3};
  }

  constexpr Jac neg() const { return {X, -Y, Z}; }

  Affine<F> to_affine() const {
    if (is_infinity()) return Affine<F>::infinity();
    const F zi = Z.inverse();
    const F zi2 = zi.square();
    return {X * zi2, Y * zi2 * zi};
  }

  // Scalar given as little-endian limbs (plain double-and-add over wNAF).
  Jac mul_limbs(std::span<const u64> k) const;

  Jac mul(const Fr& k) const {
    const Limbs4 limbs = k.to_limbs();
    return mul_limbs(std::span<const u64>(limbs.data(), 4));
  }
};

// width-4 NAF digits, most significant first
std::vector<int8_t> wnaf4(std::span<const u64> k);

template <typename F>
Jac<F> Jac<F>::mul_limbs(std::span<const u64> k) const {
  const std::vector<int8_t> naf = wnaf4(k);
  if (naf.empty() || is_infinity()) return infinity();
  // odd multiples 1P, 3P, 5P, 7P
  Jac tbl[4];
  tbl[0] = *this;
  const Jac two = dbl();
  for (int i = 1; i < 4; ++i) tbl[i] = tbl[i - 1].add(two);
  Jac acc = infinity();
  for (int8_t d : naf) {
    acc = acc.dbl();
    if (d > 0) acc = acc.add(tbl[(d - 1) / 2]);
    else if (d < 0) acc = acc.add(tbl[(-d - 1) / 2].neg());
  }
  return acc;
}

using G1Affine = Affine<Fp>;
using G1 = Jac<Fp>;
using G2Affine = Affine<Fp2>;
using G2 = Jac<Fp2>;

// curve constants
const Fp& g1_b();           // 3
const Fp2& g2_b();          // 3 / (9+i)
const G1Affine& g1_gen();   // (1, 2)
const G2Affine& g2_gen();

bool g1_on_curve(const G1Affine& a);
bool g2_on_curve(const G2Affine& a);
bool g2_in_subgroup(const G2Affine& a);  // r*Q == infinity

// Canonical compressed encodings.
// G1 (32 bytes): big-endian x with flag bits in byte 0 (0x80 finite, 0x40 odd y);
// the identity is all-zero. G2 (64 bytes): BE(x.c1) || BE(x.c0), same flags.
void g1_to_bytes(const G1Affine& a, std::uint8_t out[32]);
void g2_to_bytes(const G2Affine& a, std::uint8_t out[64]);
std::optional<G1Affine> g1_from_bytes(std::span<const std::uint8_t, 32> in);
std::optional<G2Affine> g2_from_bytes(std::span<const std::uint8_t, 64> in);

// Multi-scalar multiplication: sum scalars[i] * points[i]. Lengths must match.
G1 msm(std::span<const G1Affine> points, std::span<const Fr> scalars);
G2 msm_g2(std::span<const G2Affine> points, std::span<const Fr> scalars);

}  // namespace pisces::group
