// Additively homomorphic Pedersen vector commitments over G1.
#pragma once

#include <array>
#include <span>
#include <vector>

#include "pisces/group/curve.hpp"

namespace pisces::sign {

using group::Fr;
using group::G1;
using group::G1Affine;

inline constexpr size_t kMaxCommitSlots = 6;

// Fixed global bases: h for the randomness, g_1..g_6 for the message slots.
// All derived by hashing fixed domain tags, so no party knows their dlogs.
struct PedersenBases {
  G1Affine h;
  std::array<G1Affine, kMaxCommitSlots> g;
};

const PedersenBases& pedersen_bases();

// point = h^randomness * prod g_j^{messages[j]}; throws on more than 6 slots
G1Affine pedersen_commit(std::span<const Fr> messages, const Fr& randomness);

// Prover-side opening; the committed point is recomputable from it.
struct PedersenOpening {
  std::vector<Fr> messages;
  Fr randomness;

  G1Affine commit() const {
    return pedersen_commit(std::span<const Fr>(messages.data(), messages.size()),
                           randomness);
  }
};

}  // namespace pisces::sign
