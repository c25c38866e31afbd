#include "pisces/sign/ps.hpp"

#include "pisces/group/fixed_base.hpp"

#include <cstring>
#include <stdexcept>

namespace pisces::sign {

using group::G1;
using group::G2;

std::vector<std::uint8_t> PSPublicKey::serialize() const {
  std::vector<std::uint8_t> out;
  out.push_back(0x01);  // curve id: bn254
  out.push_back(static_cast<std::uint8_t>(slots()));
  std::uint8_t buf[64];
  g1_to_bytes(g, buf);
  out.insert(out.end(), buf, buf + 32);
  g2_to_bytes(g_tilde, buf);
  out.insert(out.end(), buf, buf + 64);
  g2_to_bytes(x_tilde, buf);
  out.insert(out.end(), buf, buf + 64);
  for (const auto& yt : y_tilde) {
    g2_to_bytes(yt, buf);
    out.insert(out.end(), buf, buf + 64);
  }
  for (const auto& yg : y_g1) {
    g1_to_bytes(yg, buf);
    out.insert(out.end(), buf, buf + 32);
  }
  return out;
}

std::optional<PSPublicKey> PSPublicKey::deserialize(std::span<const std::uint8_t> in) {
  if (in.size() < 2 || in[0] != 0x01) return std::nullopt;
  const size_t slots = in[1];
  if (slots < 1 || slots > kMaxSignSlots) return std::nullopt;
  const size_t need = 2 + 32 + 64 + 64 + slots * 64 + slots * 32;
  if (in.size() != need) return std::nullopt;
  size_t off = 2;
  auto rd_g1 = [&](G1Affine& out) {
    auto p = group::g1_from_bytes(std::span<const std::uint8_t, 32>(in.data() + off, 32));
    off += 32;
    if (p) out = *p;
    return p.has_value();
  };
  auto rd_g2 = [&](G2Affine& out) {
    auto p = group::g2_from_bytes(std::span<const std::uint8_t, 64>(in.data() + off, 64));
    off += 64;
    if (p) out = *p;
    return p.has_value();
  };
  PSPublicKey pk;
  if (!rd_g1(pk.g) || !rd_g2(pk.g_tilde) || !rd_g2(pk.x_tilde)) return std::nullopt;
  pk.y_tilde.resize(slots);
  pk.y_g1.resize(slots);
  for (auto& yt : pk.y_tilde)
    if (!rd_g2(yt)) return std::nullopt;
  for (auto& yg : pk.y_g1)
    if (!rd_g1(yg)) return std::nullopt;
  if (pk.g.inf || pk.g_tilde.inf) return std::nullopt;
  return pk;
}

PSKeyPair ps_keygen(size_t slots, Rng& rng) {
  if (slots < 1 || slots > kMaxSignSlots)
    throw std::invalid_argument("ps_keygen: slot count must be in [1, 5]");
  PSKeyPair kp;
  kp.sk.x = rng.nonzero_scalar();
  kp.pk.g = group::g1_gen();
  kp.pk.g_tilde = group::g2_gen();
  kp.pk.x_tilde = G2::from_affine(kp.pk.g_tilde).mul(kp.sk.x).to_affine();
  for (size_t j = 0; j < slots; ++j) {
    const Fr yj = rng.nonzero_scalar();
    kp.sk.y.push_back(yj);
    kp.pk.y_tilde.push_back(G2::from_affine(kp.pk.g_tilde).mul(yj).to_affine());
    kp.pk.y_g1.push_back(group::fast_mul(kp.pk.g, yj).to_affine());
  }
  return kp;
}

PSSignature ps_sign(const PSSecretKey& sk, std::span<const Fr> messages, Rng& rng) {
  if (messages.size() != sk.y.size())
    throw std::invalid_argument("ps_sign: message count does not match key slots");
  Fr e = sk.x;
  for (size_t j = 0; j < messages.size(); ++j) e += sk.y[j] * messages[j];
  const Fr u = rng.nonzero_scalar();
  const G1Affine s1 = group::fast_mul(group::g1_gen(), u).to_affine();
  const G1Affine s2 = G1::from_affine(s1).mul(e).to_affine();
  return {s1, s2};
}

bool ps_verify(const PSPublicKey& pk, std::span<const Fr> messages,
               const PSSignature& sig) {
  if (messages.size() != pk.slots()) return false;
  if (sig.s1.inf) return false;
  // e(s1, X̃ prod Ỹ_j^{m_j}) * e(-s2, g̃) == 1
  G2 acc = G2::from_affine(pk.x_tilde);
  for (size_t j = 0; j < messages.size(); ++j)
    acc = acc.add(G2::from_affine(pk.y_tilde[j]).mul(messages[j]));
  const G1Affine ps[2] = {sig.s1, sig.s2.neg()};
  const G2Affine qs[2] = {acc.to_affine(), pk.g_tilde};
  return group::multi_pair(ps, qs).is_one();
}

PSSignature ps_randomize(const PSSignature& sig, const Fr& r, const Fr& t) {
  if (r.is_zero()) throw std::invalid_argument("ps_randomize: r must be nonzero");
  const G1 s1 = G1::from_affine(sig.s1);
  const G1 s2 = G1::from_affine(sig.s2).add(s1.mul(t));
  return {s1.mul(r).to_affine(), s2.mul(r).to_affine()};
}

G1Affine ps_blind_commit(const PSPublicKey& pk, std::span<const Fr> messages,
                         const Fr& t) {
  if (messages.size() != pk.slots())
    throw std::invalid_argument("ps_blind_commit: message count does not match key slots");
  G1 acc = group::fast_mul(pk.g, t);
  for (size_t j = 0; j < messages.size(); ++j)
    acc = acc.add(G1::from_affine(pk.y_g1[j]).mul(messages[j]));
  return acc.to_affine();
}

PSSignature ps_blind_sign(const PSSecretKey& sk, const G1Affine& commitment,
                          Rng& rng) {
  const Fr u = rng.nonzero_scalar();
  const G1 xc = group::fast_mul(group::g1_gen(), sk.x).add(G1::from_affine(commitment));
  return {group::fast_mul(group::g1_gen(), u).to_affine(), xc.mul(u).to_affine()};
}

PSSignature ps_unblind(const PSSignature& blinded, const Fr& t) {
  const G1 s2 = G1::from_affine(blinded.s2)
                    .add(G1::from_affine(blinded.s1).mul(t).neg());
  return {blinded.s1, s2.to_affine()};
}

}  // namespace pisces::sign
