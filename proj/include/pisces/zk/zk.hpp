// Fiat-Shamir Sigma-protocol toolkit: statements are AND-compositions of
// atomic clauses over slots of declared commitments; one proof with a single
// shared challenge covers the whole composition. Slots linked by Equal
// clauses share one witness variable and therefore one response scalar.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "pisces/group/curve.hpp"
#include "pisces/group/rng.hpp"
#include "pisces/sign/ps.hpp"

namespace pisces::zk {

using group::Fr;
using group::G1Affine;
using group::Rng;

inline constexpr std::string_view kFiatShamirTag = "pisces/fs/v1";

struct SlotRef {
  std::uint16_t commit = 0;
  std::uint16_t slot = 0;
  bool operator==(const SlotRef&) const = default;
};

// A commitment the statement talks about. Empty `bases` means the global
// Pedersen bases (h, g_1..g_arity); otherwise bases[0] is the randomness
// base and bases[1..arity] the message bases (e.g. (g, Y_j) for blind
// issuance commitments).
struct CommitDecl {
  G1Affine point;
  std::uint16_t arity = 0;
  std::vector<G1Affine> bases;
};

// knowledge of the full opening of one commitment
struct OpeningClause {
  std::uint16_t commit = 0;
};

// two slots hold the same value (merges witness variables)
struct EqualClause {
  SlotRef a, b;
};

struct LinearTerm {
  Fr coeff;
  SlotRef slot;
};

// sum coeff_k * slot_k = constant
struct LinearClause {
  std::vector<LinearTerm> terms;
  Fr constant;
};

// slot = revealed public value
struct PublicSlotClause {
  SlotRef slot;
  Fr value;
};

// target = k * factor, via the auxiliary chain
//   c_factor = h^{r_a} g_1^{factor},  c_value = c_factor^{k} h^{r_f},
//   c_value = h^{r_cv} g_1^{target}
struct ProductClause {
  SlotRef k, factor, target;
  G1Affine c_factor, c_value;
};

// slot in [0, 2^bits): bit commitments, per-bit zero-or-one OR proofs, and
// an opening of prod bit_commits[k]^{2^k} tying the weighted bit sum to the slot
struct RangeClause {
  SlotRef slot;
  std::uint8_t bits = 32;
  std::vector<G1Affine> bit_commits;
};

// knowledge of a randomized PS signature on the listed slots plus blinding t:
// e(s1', X~ * prod Y~_j^{m_j} * g~^t) = e(s2', g~)
struct SigPoKClause {
  sign::PSPublicKey pk;
  sign::PSSignature randomized;
  std::vector<SlotRef> slots;
};

using Clause = std::variant<OpeningClause, EqualClause, LinearClause,
                            PublicSlotClause, ProductClause, RangeClause,
                            SigPoKClause>;

struct Statement {
  std::vector<CommitDecl> commitments;
  std::vector<Clause> clauses;

  // canonical bytes, also the statement's contribution to the challenge hash
  std::vector<std::uint8_t> serialize() const;
};

// Prover-side auxiliary witnesses per clause (keyed by clause index).
struct ProductAux {
  Fr r_factor, r_f;  // r_cv is derived as r_factor * k + r_f
};
struct RangeAux {
  std::vector<Fr> bit_rand;  // one per bit; the tie randomness is their weighted sum
};
struct SigAux {
  Fr t;  // blinding used when the signature was randomized
};

struct Witness {
  std::vector<std::vector<Fr>> messages;  // per commitment, length = arity
  std::vector<Fr> randomness;             // per commitment
  std::map<std::size_t, ProductAux> product;
  std::map<std::size_t, RangeAux> range;
  std::map<std::size_t, SigAux> sig;
};

struct Proof {
  struct ClausePart {
    std::uint8_t tag = 0;
    std::vector<std::uint8_t> first_round;  // first-round messages, canonical bytes
    std::vector<Fr> responses;              // response scalars
  };
  std::vector<ClausePart> parts;
  Fr challenge;

  std::vector<std::uint8_t> serialize() const;
  static std::optional<Proof> deserialize(std::span<const std::uint8_t> in);
  std::size_t byte_size() const { return serialize().size(); }
};

// Throws std::invalid_argument when the witness does not satisfy the
// statement (the prover never silently emits an invalid proof).
Proof prove(const Statement& st, const Witness& w,
            std::span<const std::uint8_t> context, Rng& rng);

// False on any failure, including malformed statements or proofs.
bool verify(const Statement& st, const Proof& proof,
            std::span<const std::uint8_t> context);

// Test-only: transcript sampled without a witness (responses and challenge
// first, first-round messages solved for). Verifies all clause equations but
// not the Fiat-Shamir hash relation.
Proof simulate(const Statement& st, Rng& rng);

// Equation-level check used by simulate()'s tests: everything except the
// challenge-hash recomputation.
bool verify_equations(const Statement& st, const Proof& proof);

namespace testing {

// Interactive two-challenge session for the special-soundness smoke test.
class Session {
 public:
  Session(const Statement& st, const Witness& w, Rng& rng);
  ~Session();
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  // answer the same first round under an injected challenge
  Proof answer(const Fr& challenge) const;

 private:
  struct Impl;
  Impl* impl_;
};

// Extract witness values from two accepting transcripts that share a first
// round; returns values per internal variable root, or nullopt on failure.
std::optional<std::map<std::size_t, Fr>> extract(const Statement& st,
                                                 const Proof& a,
                                                 const Proof& b);

// Internal variable root for a slot (to compare extracted values).
std::size_t var_root(const Statement& st, SlotRef ref);

}  // namespace testing

// Prover-side convenience: builds a statement and its witness together,
// creating auxiliary commitments (product chains, range bits) and
// randomizing signatures as clauses are added.
class StatementBuilder {
 public:
  explicit StatementBuilder(Rng& rng) : rng_(rng) {}

  // commitment under the global Pedersen bases; returns its index
  std::size_t add_commitment(std::vector<Fr> messages, const Fr& randomness);
  // commitment under explicit bases (bases[0] = randomness base)
  std::size_t add_commitment(std::vector<G1Affine> bases, std::vector<Fr> messages,
                             const Fr& randomness);
  // declare an existing point whose opening this prover knows
  std::size_t add_commitment_point(const G1Affine& point, std::vector<Fr> messages,
                                   const Fr& randomness,
                                   std::vector<G1Affine> bases = {});

  void opening(std::size_t commit);
  void equal(SlotRef a, SlotRef b);
  void linear(std::vector<LinearTerm> terms, const Fr& constant);
  void public_slot(SlotRef slot, const Fr& value);
  void product(SlotRef k, SlotRef factor, SlotRef target);
  void range(SlotRef slot, std::uint8_t bits = 32);
  // randomizes sig and records the blinding; returns the randomized signature
  sign::PSSignature sig_pok(const sign::PSPublicKey& pk, const sign::PSSignature& sig,
                            std::vector<SlotRef> slots);

  const Statement& statement() const { return st_; }
  const Witness& witness() const { return w_; }

  Proof prove(std::span<const std::uint8_t> context) {
    return zk::prove(st_, w_, context, rng_);
  }

 private:
  Fr slot_value(SlotRef ref) const;

  Rng& rng_;
  Statement st_;
  Witness w_;
};

}  // namespace pisces::zk
