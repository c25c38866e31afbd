#include "pisces/group/fixed_base.hpp"

#include <string>

#include "pisces/group/hash.hpp"

namespace pisces::group {

FixedBaseTable::FixedBaseTable(const G1Affine& base) {
  if (base.inf) return;
  rows_.resize(32);
  std::vector<G1> jac;
  jac.reserve(32 * 255);
  G1 row_base = G1::from_affine(base);
  for (int i = 0; i < 32; ++i) {
    G1 acc = G1::infinity();
    for (int d = 1; d <= 255; ++d) {
      acc = acc.add(row_base);
      jac.push_back(acc);
    }
    for (int b = 0; b < 8; ++b) row_base = row_base.dbl();
  }
  // batch-normalize with a single field inversion (all Z are nonzero because
  // every entry is a nonzero multiple of a prime-order point)
  const std::size_t n = jac.size();
  std::vector<Fp> prefix(n);
  Fp run = Fp::one();
  for (std::size_t i = 0; i < n; ++i) {
    prefix[i] = run;
    run = run * jac[i].Z;
  }
  Fp inv = run.inverse();
  for (std::size_t i = n; i-- > 0;) {
    const Fp zi = prefix[i] * inv;
    inv = inv * jac[i].Z;
    const Fp zi2 = zi.square();
    rows_[i / 255][i % 255] = G1Affine{jac[i].X * zi2, jac[i].Y * zi2 * zi};
  }
}

G1 FixedBaseTable::mul(const Fr& k) const {
  if (rows_.empty()) return G1::infinity();
  const Limbs4 limbs = k.to_limbs();
  G1 acc = G1::infinity();
  for (int i = 0; i < 32; ++i) {
    const unsigned byte = (limbs[i / 8] >> (8 * (i % 8))) & 0xff;
    if (byte) acc = acc.add(rows_[i][byte - 1]);
  }
  return acc;
}

const std::array<G1Affine, 8>& well_known_bases() {
  static const std::array<G1Affine, 8> pts = [] {
    std::array<G1Affine, 8> a;
    a[0] = g1_gen();
    a[1] = hash_to_g1("pisces/base/h", {});
    for (int j = 0; j < 6; ++j)
      a[2 + j] = hash_to_g1("pisces/base/" + std::to_string(j + 1), {});
    return a;
  }();
  return pts;
}

G1 fast_mul(const G1Affine& base, const Fr& k) {
  static const std::vector<FixedBaseTable> tables = [] {
    std::vector<FixedBaseTable> t;
    t.reserve(8);
    for (const G1Affine& p : well_known_bases()) t.emplace_back(p);
    return t;
  }();
  const auto& pts = well_known_bases();
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (pts[i] == base) return tables[i].mul(k);
  return G1::from_affine(base).mul(k);
}

}  // namespace pisces::group
