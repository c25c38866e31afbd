// Canonical byte encodings for statements and proofs. The statement encoding
// doubles as its contribution to the Fiat-Shamir challenge, so it must be
// injective on everything the verifier depends on.

#include <variant>

#include "pisces/zk/zk.hpp"
#include "wire.hpp"

namespace pisces::zk {

namespace {

void put_ref(std::vector<std::uint8_t>& out, SlotRef ref) {
  wire::put_u16(out, ref.commit);
  wire::put_u16(out, ref.slot);
}

}  // namespace

std::vector<std::uint8_t> Statement::serialize() const {
  std::vector<std::uint8_t> out;
  wire::put_u16(out, static_cast<std::uint16_t>(commitments.size()));
  for (const CommitDecl& d : commitments) {
    wire::put_g1(out, d.point);
    wire::put_u16(out, d.arity);
    wire::put_u16(out, static_cast<std::uint16_t>(d.bases.size()));
    for (const auto& b : d.bases) wire::put_g1(out, b);
  }
  wire::put_u16(out, static_cast<std::uint16_t>(clauses.size()));
  for (const Clause& cl : clauses) {
    std::visit(
        [&out](const auto& c) {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, OpeningClause>) {
            wire::put_u8(out, wire::kTagOpening);
            wire::put_u16(out, c.commit);
          } else if constexpr (std::is_same_v<T, EqualClause>) {
            wire::put_u8(out, wire::kTagEqual);
            put_ref(out, c.a);
            put_ref(out, c.b);
          } else if constexpr (std::is_same_v<T, LinearClause>) {
            wire::put_u8(out, wire::kTagLinear);
            wire::put_u16(out, static_cast<std::uint16_t>(c.terms.size()));
            for (const LinearTerm& t : c.terms) {
              wire::put_fr(out, t.coeff);
              put_ref(out, t.slot);
            }
            wire::put_fr(out, c.constant);
          } else if constexpr (std::is_same_v<T, PublicSlotClause>) {
            wire::put_u8(out, wire::kTagPublic);
            put_ref(out, c.slot);
            wire::put_fr(out, c.value);
          } else if constexpr (std::is_same_v<T, ProductClause>) {
            wire::put_u8(out, wire::kTagProduct);
            put_ref(out, c.k);
            put_ref(out, c.factor);
            put_ref(out, c.target);
            wire::put_g1(out, c.c_factor);
            wire::put_g1(out, c.c_value);
          } else if constexpr (std::is_same_v<T, RangeClause>) {
            wire::put_u8(out, wire::kTagRange);
            put_ref(out, c.slot);
            wire::put_u8(out, c.bits);
            for (const auto& b : c.bit_commits) wire::put_g1(out, b);
          } else if constexpr (std::is_same_v<T, SigPoKClause>) {
            wire::put_u8(out, wire::kTagSigPoK);
            const std::vector<std::uint8_t> pk = c.pk.serialize();
            wire::put_u16(out, static_cast<std::uint16_t>(pk.size()));
            out.insert(out.end(), pk.begin(), pk.end());
            wire::put_g1(out, c.randomized.s1);
            wire::put_g1(out, c.randomized.s2);
            wire::put_u16(out, static_cast<std::uint16_t>(c.slots.size()));
            for (SlotRef ref : c.slots) put_ref(out, ref);
          }
        },
        cl);
  }
  return out;
}

std::vector<std::uint8_t> Proof::serialize() const {
  std::vector<std::uint8_t> out;
  wire::put_u16(out, static_cast<std::uint16_t>(parts.size()));
  for (const ClausePart& part : parts) {
    wire::put_u8(out, part.tag);
    wire::put_u16(out, static_cast<std::uint16_t>(part.first_round.size()));
    out.insert(out.end(), part.first_round.begin(), part.first_round.end());
    wire::put_u16(out, static_cast<std::uint16_t>(part.responses.size()));
    for (const Fr& s : part.responses) wire::put_fr(out, s);
  }
  wire::put_fr(out, challenge);
  return out;
}

std::optional<Proof> Proof::deserialize(std::span<const std::uint8_t> in) {
  wire::Reader r{in};
  Proof p;
  const std::uint16_t n = r.u16();
  for (std::size_t i = 0; i < n && !r.fail; ++i) {
    ClausePart part;
    part.tag = r.u8();
    const std::uint16_t fr_len = r.u16();
    const std::uint8_t* bytes = r.take(fr_len);
    if (!bytes) break;
    part.first_round.assign(bytes, bytes + fr_len);
    const std::uint16_t n_resp = r.u16();
    for (std::size_t j = 0; j < n_resp && !r.fail; ++j) {
      Fr s;
      if (r.fr(&s)) part.responses.push_back(s);
    }
    if (r.fail) break;
    p.parts.push_back(std::move(part));
  }
  if (r.fail || p.parts.size() != n) return std::nullopt;
  if (!r.fr(&p.challenge) || !r.done()) return std::nullopt;
  return p;
}

}  // namespace pisces::zk
