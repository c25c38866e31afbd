#include "pisces/group/pairing.hpp"

#include <cassert>
#include <vector>

namespace pisces::group {
namespace {

// Frobenius coefficients gamma_{k,j} = xi^(j * (p^k - 1) / 6) for the
// w-basis view of Fp12 (w^6 = xi). All derive from c = xi^((p-1)/6):
// gamma_{1,j} = c^j, gamma_{2,j} = Norm(c)^j (in Fp), gamma_{3,j} = (Norm(c) * c)^j.
struct FrobTables {
  Fp2 g1[6];
  Fp g2[6];
  Fp2 g3[6];
};

const FrobTables& frob_tables() {
  static const FrobTables tbl = [] {
    FrobTables t;
    const Fp2 xi{Fp::from_u64(9), Fp::from_u64(1)};
    // (p - 1) / 6, little-endian limbs
    constexpr u64 kExp[4] = {0x34b017592414d4e1ULL, 0xee9591c2e6bda1c2ULL,
                             0xf40d60f3c0403964ULL, 0x0810b7bdd032f006ULL};
    const Fp2 c = xi.pow(std::span<const u64>(kExp, 4));
    const Fp norm_c = c.c0.square() + c.c1.square();
    t.g1[0] = Fp2::one();
    t.g2[0] = Fp::one();
    t.g3[0] = Fp2::one();
    for (int j = 1; j < 6; ++j) {
      t.g1[j] = t.g1[j - 1] * c;
      t.g2[j] = t.g2[j - 1] * norm_c;
      t.g3[j] = t.g3[j - 1] * (c.mul_fp(norm_c));
    }
    return t;
  }();
  return tbl;
}

// NAF digits of |6u + 2| (the optimal-ate loop length), most significant first.
const std::vector<int8_t>& ate_naf() {
  static const std::vector<int8_t> naf = [] {
    constexpr u64 kU = 4965661367192848881ULL;
    unsigned __int128 x = static_cast<unsigned __int128>(6) * kU + 2;
    std::vector<int8_t> lsb;
    while (x != 0) {
      if (x & 1) {
        const int d = (x & 3) == 3 ? -1 : 1;
        lsb.push_back(static_cast<int8_t>(d));
        if (d > 0) x -= 1;
        else x += 1;
      } else {
        lsb.push_back(0);
      }
      x >>= 1;
    }
    std::vector<int8_t> msb(lsb.rbegin(), lsb.rend());
    assert(!msb.empty() && msb.front() == 1);
    return msb;
  }();
  return naf;
}

// Line through 2T evaluated at q (Jacobian doubling with tangent-line
// coefficients, dbl-2009-l shape); multiplies the line into f.
void line_func_double(Fp12& f, Jac<Fp2>& r, const G1Affine& q) {
  const Fp2 r_t = r.Z.square();
  const Fp2 A = r.X.square();
  const Fp2 B = r.Y.square();
  const Fp2 C = B.square();
  Fp2 D = (r.X + B).square() - A - C;
  D = D.dbl();
  const Fp2 E = A.dbl() + A;
  const Fp2 Fv = E.square();
  const Fp2 C8 = C.dbl().dbl().dbl();
  const Fp2 r_x = Fv - D.dbl();
  const Fp2 r_y = E * (D - r_x) - C8;
  const Fp2 r_z = (r.Y + r.Z).square() - B - r_t;

  const Fp2 a = (r.X + E).square() - (A + Fv + B.dbl().dbl());
  const Fp2 b = (-(E * r_t).dbl()).mul_fp(q.x);
  const Fp2 c = (r_z * r_t).dbl().mul_fp(q.y);

  r = {r_x, r_y, r_z};
  f = f.mul_line(a, b, c);
}

// Line through T and p evaluated at q; r2 caches p.y^2.
void line_func_add(Fp12& f, Jac<Fp2>& r, const G2Affine& p, const G1Affine& q,
                   const Fp2& r2) {
  const Fp2 r_t = r.Z.square();
  const Fp2 B = p.x * r_t;
  Fp2 D = (p.y + r.Z).square() - r2 - r_t;
  D = D * r_t;
  const Fp2 H = B - r.X;
  const Fp2 I = H.square();
  const Fp2 E = I.dbl().dbl();
  const Fp2 J = H * E;
  const Fp2 L1 = D - r.Y.dbl();
  const Fp2 V = r.X * E;
  const Fp2 r_x = L1.square() - J - V.dbl();
  const Fp2 r_z = (r.Z + H).square() - r_t - I;
  const Fp2 r_y = (V - r_x) * L1 - (r.Y * J).dbl();

  const Fp2 t = (p.y + r_z).square() - r2 - r_z.square();
  const Fp2 a = (L1 * p.x).dbl() - t;
  const Fp2 c = r_z.dbl().mul_fp(q.y);
  const Fp2 b = (-L1).dbl().mul_fp(q.x);

  r = {r_x, r_y, r_z};
  f = f.mul_line(a, b, c);
}

}  // namespace

Fp12 Fp12::frobenius() const {
  const FrobTables& t = frob_tables();
  return {Fp6{c0.c0.conjugate() * t.g1[0], c0.c1.conjugate() * t.g1[2],
              c0.c2.conjugate() * t.g1[4]},
          Fp6{c1.c0.conjugate() * t.g1[1], c1.c1.conjugate() * t.g1[3],
              c1.c2.conjugate() * t.g1[5]}};
}

Fp12 Fp12::frobenius_p2() const {
  const FrobTables& t = frob_tables();
  return {Fp6{c0.c0.mul_fp(t.g2[0]), c0.c1.mul_fp(t.g2[2]), c0.c2.mul_fp(t.g2[4])},
          Fp6{c1.c0.mul_fp(t.g2[1]), c1.c1.mul_fp(t.g2[3]), c1.c2.mul_fp(t.g2[5])}};
}

Fp12 Fp12::frobenius_p3() const {
  const FrobTables& t = frob_tables();
  return {Fp6{c0.c0.conjugate() * t.g3[0], c0.c1.conjugate() * t.g3[2],
              c0.c2.conjugate() * t.g3[4]},
          Fp6{c1.c0.conjugate() * t.g3[1], c1.c1.conjugate() * t.g3[3],
              c1.c2.conjugate() * t.g3[5]}};
}

Fp12 miller_loop(const G1Affine& p, const G2Affine& q) {
  if (p.inf || q.inf) return Fp12::one();
  const G2Affine mq = q.neg();
  Fp12 f = Fp12::one();
  Jac<Fp2> T = G2::from_affine(q);
  const Fp2 r2 = q.y.square();
  const std::vector<int8_t>& naf = ate_naf();
  // leading digit is consumed by initializing T = q
  for (size_t i = 1; i < naf.size(); ++i) {
    f = f.square();
    line_func_double(f, T, p);
    if (naf[i] == 1) line_func_add(f, T, q, p, r2);
    else if (naf[i] == -1) line_func_add(f, T, mq, p, r2);
  }
  // two correction lines through pi(q) and -pi^2(q)
  const FrobTables& ft = frob_tables();
  const G2Affine q1{q.x.conjugate() * ft.g1[2], q.y.conjugate() * ft.g1[3]};
  const G2Affine q2{q.x.mul_fp(ft.g2[2]), q.y};
  line_func_add(f, T, q1, p, q1.y.square());
  line_func_add(f, T, q2, p, q2.y.square());
  return f;
}

Fp12 final_exponentiation(const Fp12& inp) {
  constexpr u64 kU = 4965661367192848881ULL;
  // easy part: f^((p^6 - 1)(p^2 + 1))
  Fp12 t1 = inp.conjugate() * inp.inverse();
  t1 = t1 * t1.frobenius_p2();
  // hard part (Fuentes et al. addition chain for BN curves, u > 0)
  const Fp12 fp1 = t1.frobenius();
  const Fp12 fp2 = t1.frobenius_p2();
  const Fp12 fp3 = fp2.frobenius();
  const Fp12 fu1 = t1.pow_u64(kU);
  const Fp12 fu2 = fu1.pow_u64(kU);
  const Fp12 fu3 = fu2.pow_u64(kU);
  const Fp12 y0 = fp1 * fp2 * fp3;
  const Fp12 y1 = t1.conjugate();
  const Fp12 y2 = fu2.frobenius_p2();
  const Fp12 y3 = fu1.frobenius().conjugate();
  const Fp12 y4 = (fu1 * fu2.frobenius()).conjugate();
  const Fp12 y5 = fu2.conjugate();
  const Fp12 y6 = (fu3 * fu3.frobenius()).conjugate();
  Fp12 t0 = y6.square() * y4 * y5;
  t1 = y3 * y5 * t0;
  t0 = t0 * y2;
  t1 = t1.square() * t0;
  t1 = t1.square();
  t0 = t1 * y1;
  t1 = t1 * y0;
  t0 = t0.square() * t1;
  return t0;
}

GT pair(const G1Affine& p, const G2Affine& q) {
  if (p.inf || q.inf) return GT::one();
  return final_exponentiation(miller_loop(p, q));
}

GT multi_pair(std::span<const G1Affine> ps, std::span<const G2Affine> qs) {
  assert(ps.size() == qs.size());
  Fp12 f = Fp12::one();
  bool any = false;
  for (size_t i = 0; i < ps.size(); ++i) {
    if (ps[i].inf || qs[i].inf) continue;
    f = any ? f * miller_loop(ps[i], qs[i]) : miller_loop(ps[i], qs[i]);
    any = true;
  }
  if (!any) return GT::one();
  return final_exponentiation(f);
}

void gt_to_bytes(const GT& e, std::uint8_t out[384]) {
  const Fp* coeffs[12] = {
      &e.c0.c0.c0, &e.c0.c0.c1, &e.c0.c1.c0, &e.c0.c1.c1,
      &e.c0.c2.c0, &e.c0.c2.c1, &e.c1.c0.c0, &e.c1.c0.c1,
      &e.c1.c1.c0, &e.c1.c1.c1, &e.c1.c2.c0, &e.c1.c2.c1,
  };
  for (int i = 0; i < 12; ++i) coeffs[i]->to_bytes(out + 32 * i);
}

std::optional<GT> gt_from_bytes(std::span<const std::uint8_t, 384> in) {
  GT e;
  Fp* coeffs[12] = {
      &e.c0.c0.c0, &e.c0.c0.c1, &e.c0.c1.c0, &e.c0.c1.c1,
      &e.c0.c2.c0, &e.c0.c2.c1, &e.c1.c0.c0, &e.c1.c0.c1,
      &e.c1.c1.c0, &e.c1.c1.c1, &e.c1.c2.c0, &e.c1.c2.c1,
  };
  for (int i = 0; i < 12; ++i) {
    auto c = Fp::from_bytes(
        std::span<const std::uint8_t, 32>(in.data() + 32 * i, 32));
    if (!c) return std::nullopt;
    *coeffs[i] = *c;
  }
  return e;
}

}  // namespace pisces::group
