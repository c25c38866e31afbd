// Pointcheval-Sanders multi-message randomizable signatures with blind
// issuance over committed messages (type-3 pairing setting).
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pisces/group/curve.hpp"
#include "pisces/group/pairing.hpp"
#include "pisces/group/rng.hpp"

namespace pisces::sign {

using group::Fr;
using group::G1Affine;
using group::G2Affine;
using group::Rng;

inline constexpr size_t kMaxSignSlots = 5;

struct PSSecretKey {
  Fr x;
  std::vector<Fr> y;
};

struct PSPublicKey {
  G1Affine g;                    // G1 base (the global generator)
  G2Affine g_tilde;              // G2 base
  G2Affine x_tilde;              // g̃^x
  std::vector<G2Affine> y_tilde; // g̃^{y_j}
  std::vector<G1Affine> y_g1;    // g^{y_j}, used for blind issuance

  size_t slots() const { return y_tilde.size(); }

  std::vector<std::uint8_t> serialize() const;
  static std::optional<PSPublicKey> deserialize(std::span<const std::uint8_t> in);
};

struct PSKeyPair {
  PSSecretKey sk;
  PSPublicKey pk;
};

struct PSSignature {
  G1Affine s1;
  G1Affine s2;

  bool operator==(const PSSignature& o) const { return s1 == o.s1 && s2 == o.s2; }
};

// slots must be in [1, 5]; throws otherwise
PSKeyPair ps_keygen(size_t slots, Rng& rng);

// sigma = (g^u, g^{u(x + sum y_j m_j)}); message count must equal slot count
PSSignature ps_sign(const PSSecretKey& sk, std::span<const Fr> messages, Rng& rng);

// sigma1 != identity and e(sigma1, X̃ prod Ỹ_j^{m_j}) = e(sigma2, g̃)
bool ps_verify(const PSPublicKey& pk, std::span<const Fr> messages,
               const PSSignature& sig);

// (sigma1^r, (sigma2 * sigma1^t)^r); throws if r = 0
PSSignature ps_randomize(const PSSignature& sig, const Fr& r, const Fr& t);

// Blind issuance: the user commits C = g^t * prod Y_j^{m_j}, the signer
// returns (g^u, (g^x * C)^u), and the user divides out sigma1^t.
G1Affine ps_blind_commit(const PSPublicKey& pk, std::span<const Fr> messages,
                         const Fr& t);
PSSignature ps_blind_sign(const PSSecretKey& sk, const G1Affine& commitment,
                          Rng& rng);
PSSignature ps_unblind(const PSSignature& blinded, const Fr& t);

}  // namespace pisces::sign
