// Fixed-base scalar multiplication with byte-window precomputation for the
// handful of bases the protocol multiplies constantly: the G1 generator and
// the global commitment bases.
#pragma once

#include <array>
#include <vector>

#include "pisces/group/curve.hpp"

namespace pisces::group {

class FixedBaseTable {
 public:
  explicit FixedBaseTable(const G1Affine& base);

  // 32 mixed additions: one table row per scalar byte
  G1 mul(const Fr& k) const;

 private:
  // rows_[i][d-1] = d * 256^i * base, d in 1..255
  std::vector<std::array<G1Affine, 255>> rows_;
};

// The fixed points every party multiplies against: index 0 is the G1
// generator, 1 the commitment randomness base h, 2..7 the commitment message
// bases g_1..g_6 (all but the generator derived by hashing domain tags).
const std::array<G1Affine, 8>& well_known_bases();

// Multiplies via a precomputed table when `base` is one of the well-known
// fixed points, falling back to the generic ladder otherwise.
G1 fast_mul(const G1Affine& base, const Fr& k);

}  // namespace pisces::group
