#include "pisces/sign/pedersen.hpp"

#include <stdexcept>

#include "pisces/group/fixed_base.hpp"

namespace pisces::sign {

const PedersenBases& pedersen_bases() {
  static const PedersenBases bases = [] {
    const auto& pts = group::well_known_bases();
    PedersenBases b;
    b.h = pts[1];
    for (size_t j = 0; j < kMaxCommitSlots; ++j) b.g[j] = pts[2 + j];
    return b;
  }();
  return bases;
}

G1Affine pedersen_commit(std::span<const Fr> messages, const Fr& randomness) {
  if (messages.size() > kMaxCommitSlots)
    throw std::invalid_argument("pedersen_commit: too many messages");
  const PedersenBases& b = pedersen_bases();
  G1 acc = group::fast_mul(b.h, randomness);
  for (size_t j = 0; j < messages.size(); ++j)
    acc = acc.add(group::fast_mul(b.g[j], messages[j]));
  return acc.to_affine();
}

}  // namespace pisces::sign
