// Optimal ate pairing e: G1 x G2 -> GT (subgroup of Fp12^*).
#pragma once

#include "pisces/group/curve.hpp"

#include <optional>

namespace pisces::group {

using GT = Fp12;

Fp12 miller_loop(const G1Affine& p, const G2Affine& q);
Fp12 final_exponentiation(const Fp12& f);

GT pair(const G1Affine& p, const G2Affine& q);

// prod_i e(ps[i], qs[i]) with a single final exponentiation
GT multi_pair(std::span<const G1Affine> ps, std::span<const G2Affine> qs);

// Canonical 384-byte GT encoding: the twelve Fp coefficients, big-endian,
// in lexicographic tower order (c0.c0.c0, c0.c0.c1, c0.c1.c0, ...).
void gt_to_bytes(const GT& e, std::uint8_t out[384]);
std::optional<GT> gt_from_bytes(std::span<const std::uint8_t, 384> in);

}  // namespace pisces::group
