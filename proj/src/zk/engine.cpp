// Proving engine. A statement is lowered to a system of discrete-log
// equations over shared witness variables: every commitment contributes one
// randomness variable plus one variable per slot, Equal clauses merge
// variables through a union-find, and auxiliary clauses (product chains,
// range bits, signature blindings) append fresh variables in clause order so
// prover and verifier derive the same numbering from the public statement.
// Each merged variable gets exactly one response scalar, carried by the first
// clause that references it.

#include <cstring>
#include <numeric>
#include <stdexcept>
#include <variant>

#include "pisces/group/fixed_base.hpp"
#include "pisces/group/hash.hpp"
#include "pisces/group/pairing.hpp"
#include "pisces/sign/pedersen.hpp"
#include "pisces/zk/zk.hpp"
#include "wire.hpp"

namespace pisces::zk {
namespace {

using group::G1;
using group::G2;
using group::G2Affine;
using group::GT;
using group::Limbs4;

// ---------------------------------------------------------------------------
// Lowered form

// product of base^{var} over all terms equals target
struct G1Eq {
  G1Affine target;
  std::vector<std::pair<G1Affine, std::size_t>> terms;
};

// sum of coeff * var equals constant
struct LinEq {
  std::vector<std::pair<Fr, std::size_t>> terms;
  Fr constant;
};

// commitment opens to h^r g^b with b in {0, 1} (two-branch OR)
struct BitOrEq {
  G1Affine commit;
};

// e(s1', X~ * g~^{t} * prod Y~_j^{m_j}) = e(s2', g~); vars[0] = t
struct PairEq {
  const SigPoKClause* clause = nullptr;
  std::vector<std::size_t> vars;
};

struct ClausePlan {
  std::uint8_t tag = 0;
  std::vector<BitOrEq> bits;  // emitted before the other equations
  std::vector<G1Eq> g1;
  std::vector<LinEq> lin;
  std::optional<PairEq> pair;
  std::vector<std::size_t> owned;  // variable roots answered by this clause
  std::size_t first_round_size = 0;
  // fresh-variable ids (meaning depends on the clause type)
  std::size_t fresh0 = 0, fresh1 = 0, fresh2 = 0;

  std::size_t response_count() const { return 3 * bits.size() + owned.size(); }
};

struct Lowered {
  std::vector<std::size_t> commit_var0;  // commitment -> its randomness variable
  std::vector<std::vector<G1Affine>> commit_bases;
  std::vector<std::size_t> root;  // variable id -> merged root id
  std::size_t n_total = 0;
  std::vector<ClausePlan> plans;
};

std::size_t slot_var(const Lowered& lo, SlotRef ref) {
  return lo.commit_var0[ref.commit] + 1 + ref.slot;
}

Lowered lower(const Statement& st) {
  if (st.commitments.size() > 0xffff || st.clauses.size() > 0xffff)
    throw std::invalid_argument("statement too large");

  Lowered lo;
  std::size_t next = 0;
  for (const CommitDecl& d : st.commitments) {
    if (d.arity == 0) throw std::invalid_argument("commitment arity must be positive");
    std::vector<G1Affine> bases;
    if (d.bases.empty()) {
      if (d.arity > sign::kMaxCommitSlots)
        throw std::invalid_argument("commitment arity exceeds the global bases");
      const auto& gb = sign::pedersen_bases();
      bases.push_back(gb.h);
      for (std::size_t j = 0; j < d.arity; ++j) bases.push_back(gb.g[j]);
    } else {
      if (d.bases.size() != static_cast<std::size_t>(d.arity) + 1)
        throw std::invalid_argument("explicit bases must cover randomness plus every slot");
      bases = d.bases;
    }
    lo.commit_bases.push_back(std::move(bases));
    lo.commit_var0.push_back(next);
    next += static_cast<std::size_t>(d.arity) + 1;
  }
  const std::size_t n_base = next;

  auto check_ref = [&](SlotRef ref) {
    if (ref.commit >= st.commitments.size() ||
        ref.slot >= st.commitments[ref.commit].arity)
      throw std::invalid_argument("slot reference outside the declared commitments");
  };

  // merge Equal-linked slots
  std::vector<std::size_t> parent(n_base);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&parent](std::size_t v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  };
  for (const Clause& cl : st.clauses) {
    if (const auto* eq = std::get_if<EqualClause>(&cl)) {
      check_ref(eq->a);
      check_ref(eq->b);
      parent[find(slot_var(lo, eq->a))] = find(slot_var(lo, eq->b));
    }
  }
  lo.root.resize(n_base);
  for (std::size_t v = 0; v < n_base; ++v) lo.root[v] = find(v);

  std::vector<char> claimed(n_base, 0);
  auto fresh = [&lo, &claimed]() {
    const std::size_t id = lo.root.size();
    lo.root.push_back(id);  // fresh variables are their own root
    claimed.push_back(0);
    return id;
  };
  auto claim = [&lo, &claimed](ClausePlan& plan, std::size_t var) {
    const std::size_t r = lo.root[var];
    if (!claimed[r]) {
      claimed[r] = 1;
      plan.owned.push_back(r);
    }
  };

  const auto& gb = sign::pedersen_bases();
  const G1Affine& h = gb.h;
  const G1Affine& gm = gb.g[0];

  for (const Clause& cl : st.clauses) {
    ClausePlan plan;
    std::visit(
        [&](const auto& c) {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, OpeningClause>) {
            plan.tag = wire::kTagOpening;
            if (c.commit >= st.commitments.size())
              throw std::invalid_argument("opening clause references an unknown commitment");
            const CommitDecl& d = st.commitments[c.commit];
            const std::size_t v0 = lo.commit_var0[c.commit];
            G1Eq eq;
            eq.target = d.point;
            for (std::size_t i = 0; i <= d.arity; ++i) {
              eq.terms.emplace_back(lo.commit_bases[c.commit][i], lo.root[v0 + i]);
              claim(plan, v0 + i);
            }
            plan.g1.push_back(std::move(eq));
            plan.first_round_size = 32;
          } else if constexpr (std::is_same_v<T, EqualClause>) {
            plan.tag = wire::kTagEqual;  // already merged above; no equations
          } else if constexpr (std::is_same_v<T, LinearClause>) {
            plan.tag = wire::kTagLinear;
            if (c.terms.empty())
              throw std::invalid_argument("linear clause needs at least one term");
            LinEq eq;
            eq.constant = c.constant;
            for (const LinearTerm& t : c.terms) {
              check_ref(t.slot);
              const std::size_t v = slot_var(lo, t.slot);
              eq.terms.emplace_back(t.coeff, lo.root[v]);
              claim(plan, v);
            }
            plan.lin.push_back(std::move(eq));
            plan.first_round_size = 32;
          } else if constexpr (std::is_same_v<T, PublicSlotClause>) {
            plan.tag = wire::kTagPublic;
            check_ref(c.slot);
            const std::size_t v = slot_var(lo, c.slot);
            LinEq eq;
            eq.constant = c.value;
            eq.terms.emplace_back(Fr::one(), lo.root[v]);
            claim(plan, v);
            plan.lin.push_back(std::move(eq));
            plan.first_round_size = 32;
          } else if constexpr (std::is_same_v<T, ProductClause>) {
            plan.tag = wire::kTagProduct;
            check_ref(c.k);
            check_ref(c.factor);
            check_ref(c.target);
            const std::size_t vk = slot_var(lo, c.k);
            const std::size_t vf = slot_var(lo, c.factor);
            const std::size_t vt = slot_var(lo, c.target);
            const std::size_t ra = fresh();
            const std::size_t rf = fresh();
            const std::size_t rcv = fresh();
            plan.fresh0 = ra;
            plan.fresh1 = rf;
            plan.fresh2 = rcv;
            // c_factor = h^{ra} g^{factor}
            plan.g1.push_back(G1Eq{c.c_factor, {{h, ra}, {gm, lo.root[vf]}}});
            claim(plan, ra);
            claim(plan, vf);
            // c_value = c_factor^{k} h^{rf}
            plan.g1.push_back(G1Eq{c.c_value, {{c.c_factor, lo.root[vk]}, {h, rf}}});
            claim(plan, vk);
            claim(plan, rf);
            // c_value = h^{rcv} g^{target}; binding of c_value forces target = k * factor
            plan.g1.push_back(G1Eq{c.c_value, {{h, rcv}, {gm, lo.root[vt]}}});
            claim(plan, rcv);
            claim(plan, vt);
            plan.first_round_size = 96;
          } else if constexpr (std::is_same_v<T, RangeClause>) {
            plan.tag = wire::kTagRange;
            check_ref(c.slot);
            if (c.bits == 0 || c.bits > 32)
              throw std::invalid_argument("range width must be between 1 and 32 bits");
            if (c.bit_commits.size() != c.bits)
              throw std::invalid_argument("range clause needs one commitment per bit");
            const std::size_t v = slot_var(lo, c.slot);
            const std::size_t rsum = fresh();
            plan.fresh0 = rsum;
            for (const G1Affine& ck : c.bit_commits) plan.bits.push_back(BitOrEq{ck});
            // prod C_k^{2^k} = h^{rsum} g^{slot} ties the weighted bit sum to the slot
            G1 weighted = G1::infinity();
            for (std::size_t k = c.bits; k-- > 0;)
              weighted = weighted.dbl().add(c.bit_commits[k]);
            plan.g1.push_back(
                G1Eq{weighted.to_affine(), {{h, rsum}, {gm, lo.root[v]}}});
            claim(plan, rsum);
            claim(plan, v);
            plan.first_round_size = static_cast<std::size_t>(c.bits) * 64 + 32;
          } else if constexpr (std::is_same_v<T, SigPoKClause>) {
            plan.tag = wire::kTagSigPoK;
            if (c.slots.size() != c.pk.slots())
              throw std::invalid_argument("signature proof must bind every signed slot");
            if (c.randomized.s1.inf)
              throw std::invalid_argument("randomized signature must not be the identity");
            const std::size_t t = fresh();
            plan.fresh0 = t;
            PairEq pe;
            pe.clause = &c;
            pe.vars.push_back(t);
            claim(plan, t);
            for (SlotRef ref : c.slots) {
              check_ref(ref);
              const std::size_t v = slot_var(lo, ref);
              pe.vars.push_back(lo.root[v]);
              claim(plan, v);
            }
            plan.pair = std::move(pe);
            plan.first_round_size = 384;
          }
        },
        cl);
    lo.plans.push_back(std::move(plan));
  }
  lo.n_total = lo.root.size();
  return lo;
}

// ---------------------------------------------------------------------------
// Witness assignment: values per variable root, with full satisfaction checks.

G2 sig_message_point(const SigPoKClause& c, const Fr& t,
                     std::span<const Fr> messages) {
  G2 m = G2::from_affine(c.pk.g_tilde).mul(t);
  for (std::size_t j = 0; j < messages.size(); ++j)
    m = m.add(G2::from_affine(c.pk.y_tilde[j]).mul(messages[j]));
  return m;
}

std::vector<Fr> assign(const Statement& st, const Witness& w, const Lowered& lo) {
  if (w.messages.size() != st.commitments.size() ||
      w.randomness.size() != st.commitments.size())
    throw std::invalid_argument("witness shape does not match the statement");

  std::vector<Fr> val(lo.n_total);
  std::vector<char> set(lo.n_total, 0);
  auto put = [&](std::size_t var, const Fr& x) {
    const std::size_t r = lo.root[var];
    if (set[r] && val[r] != x)
      throw std::invalid_argument("witness conflicts across an equality link");
    val[r] = x;
    set[r] = 1;
  };

  for (std::size_t c = 0; c < st.commitments.size(); ++c) {
    if (w.messages[c].size() != st.commitments[c].arity)
      throw std::invalid_argument("witness messages do not match commitment arity");
    const std::size_t v0 = lo.commit_var0[c];
    put(v0, w.randomness[c]);
    for (std::size_t j = 0; j < w.messages[c].size(); ++j)
      put(v0 + 1 + j, w.messages[c][j]);
  }

  // fill the auxiliary variables clause by clause
  for (std::size_t ci = 0; ci < st.clauses.size(); ++ci) {
    const ClausePlan& plan = lo.plans[ci];
    const Clause& cl = st.clauses[ci];
    if (const auto* pc = std::get_if<ProductClause>(&cl)) {
      const auto it = w.product.find(ci);
      if (it == w.product.end())
        throw std::invalid_argument("missing product auxiliary witness");
      const Fr kv = val[lo.root[slot_var(lo, pc->k)]];
      const Fr rcv = it->second.r_factor * kv + it->second.r_f;
      val[plan.fresh0] = it->second.r_factor;
      val[plan.fresh1] = it->second.r_f;
      val[plan.fresh2] = rcv;
    } else if (const auto* rc = std::get_if<RangeClause>(&cl)) {
      const auto it = w.range.find(ci);
      if (it == w.range.end())
        throw std::invalid_argument("missing range auxiliary witness");
      const auto& br = it->second.bit_rand;
      if (br.size() != rc->bits)
        throw std::invalid_argument("range auxiliary witness has the wrong width");
      const Limbs4 limbs = val[lo.root[slot_var(lo, rc->slot)]].to_limbs();
      if (limbs[1] || limbs[2] || limbs[3] || (limbs[0] >> rc->bits) != 0)
        throw std::invalid_argument("range clause not satisfied");
      const auto& gb = sign::pedersen_bases();
      Fr rsum = Fr::zero();
      for (std::size_t k = rc->bits; k-- > 0;) rsum = rsum + rsum + br[k];
      val[plan.fresh0] = rsum;
      for (std::size_t k = 0; k < rc->bits; ++k) {
        G1 ck = group::fast_mul(gb.h, br[k]);
        if ((limbs[0] >> k) & 1) ck = ck.add(gb.g[0]);
        if (!(ck.to_affine() == rc->bit_commits[k]))
          throw std::invalid_argument("range bit commitment does not open");
      }
    } else if (std::get_if<SigPoKClause>(&cl) != nullptr) {
      const auto it = w.sig.find(ci);
      if (it == w.sig.end())
        throw std::invalid_argument("missing signature blinding witness");
      val[plan.fresh0] = it->second.t;
    }
  }

  // every commitment must open to the assigned values
  for (std::size_t c = 0; c < st.commitments.size(); ++c) {
    const std::size_t v0 = lo.commit_var0[c];
    G1 acc = G1::infinity();
    for (std::size_t i = 0; i < lo.commit_bases[c].size(); ++i)
      acc = acc.add(group::fast_mul(lo.commit_bases[c][i], val[lo.root[v0 + i]]));
    if (!(acc.to_affine() == st.commitments[c].point))
      throw std::invalid_argument("witness does not open a declared commitment");
  }

  // every lowered equation must hold
  for (const ClausePlan& plan : lo.plans) {
    for (const G1Eq& eq : plan.g1) {
      G1 acc = G1::infinity();
      for (const auto& [base, var] : eq.terms)
        acc = acc.add(group::fast_mul(base, val[var]));
      if (!(acc.to_affine() == eq.target))
        throw std::invalid_argument("witness does not satisfy a clause equation");
    }
    for (const LinEq& eq : plan.lin) {
      Fr sum = Fr::zero();
      for (const auto& [coeff, var] : eq.terms) sum += coeff * val[var];
      if (sum != eq.constant)
        throw std::invalid_argument("witness does not satisfy a linear relation");
    }
    if (plan.pair) {
      const SigPoKClause& c = *plan.pair->clause;
      std::vector<Fr> msgs;
      for (std::size_t j = 1; j < plan.pair->vars.size(); ++j)
        msgs.push_back(val[plan.pair->vars[j]]);
      const G2 m = sig_message_point(c, val[plan.pair->vars[0]], msgs)
                       .add(G2::from_affine(c.pk.x_tilde));
      const G1Affine pts[2] = {c.randomized.s1, c.randomized.s2.neg()};
      const G2Affine rhs[2] = {m.to_affine(), c.pk.g_tilde};
      if (!group::multi_pair(pts, rhs).is_one())
        throw std::invalid_argument("signature proof witness does not verify");
    }
  }
  return val;
}

// ---------------------------------------------------------------------------
// Fiat-Shamir challenge over context, statement, and first-round messages.

Fr fs_challenge(std::span<const std::uint8_t> context,
                std::span<const std::uint8_t> st_bytes,
                std::span<const std::uint8_t> first_rounds) {
  std::vector<std::uint8_t> buf;
  buf.reserve(8 + context.size() + st_bytes.size() + first_rounds.size());
  wire::put_u32(buf, static_cast<std::uint32_t>(context.size()));
  buf.insert(buf.end(), context.begin(), context.end());
  wire::put_u32(buf, static_cast<std::uint32_t>(st_bytes.size()));
  buf.insert(buf.end(), st_bytes.begin(), st_bytes.end());
  buf.insert(buf.end(), first_rounds.begin(), first_rounds.end());
  return group::hash_to_scalar(kFiatShamirTag, buf);
}

// per-bit prover state for the two-branch OR
struct BitLocal {
  int bit = 0;
  Fr rho_true, c_false, z_false;
};

struct ProverState {
  Lowered lo;
  std::vector<Fr> val;
  std::vector<Fr> rho;
  std::vector<std::vector<BitLocal>> bit_locals;   // per clause
  std::vector<std::vector<std::uint8_t>> rounds;   // first-round bytes per clause
};

// Runs the first round: samples blinding scalars and computes the first-round
// messages for every clause. Throws if the witness is unsatisfying.
ProverState first_round(const Statement& st, const Witness& w, Rng& rng) {
  ProverState ps;
  ps.lo = lower(st);
  ps.val = assign(st, w, ps.lo);
  ps.rho.resize(ps.lo.n_total);
  for (Fr& r : ps.rho) r = rng.scalar();

  const auto& gb = sign::pedersen_bases();
  const G1Affine& h = gb.h;
  const G1Affine& gm = gb.g[0];

  ps.bit_locals.resize(st.clauses.size());
  ps.rounds.resize(st.clauses.size());
  for (std::size_t ci = 0; ci < st.clauses.size(); ++ci) {
    const ClausePlan& plan = ps.lo.plans[ci];
    auto& bytes = ps.rounds[ci];

    for (const BitOrEq& eq : plan.bits) {
      const std::size_t k = ps.bit_locals[ci].size();
      const auto* rc = std::get_if<RangeClause>(&st.clauses[ci]);
      const Limbs4 limbs = ps.val[ps.lo.root[slot_var(ps.lo, rc->slot)]].to_limbs();
      BitLocal loc;
      loc.bit = static_cast<int>((limbs[0] >> k) & 1);
      loc.rho_true = rng.scalar();
      loc.c_false = rng.scalar();
      loc.z_false = rng.scalar();
      // branch 0 claims C = h^r, branch 1 claims C/g = h^r
      const G1 c0 = G1::from_affine(eq.commit);
      const G1 c1 = c0.add(gm.neg());
      G1Affine a01[2];
      a01[loc.bit] = group::fast_mul(h, loc.rho_true).to_affine();
      const G1& false_target = loc.bit ? c0 : c1;
      a01[1 - loc.bit] = group::fast_mul(h, loc.z_false)
                             .add(false_target.mul(loc.c_false).neg())
                             .to_affine();
      wire::put_g1(bytes, a01[0]);
      wire::put_g1(bytes, a01[1]);
      ps.bit_locals[ci].push_back(loc);
    }
    for (const G1Eq& eq : plan.g1) {
      G1 acc = G1::infinity();
      for (const auto& [base, var] : eq.terms)
        acc = acc.add(group::fast_mul(base, ps.rho[var]));
      wire::put_g1(bytes, acc.to_affine());
    }
    for (const LinEq& eq : plan.lin) {
      Fr t = Fr::zero();
      for (const auto& [coeff, var] : eq.terms) t += coeff * ps.rho[var];
      wire::put_fr(bytes, t);
    }
    if (plan.pair) {
      const SigPoKClause& c = *plan.pair->clause;
      std::vector<Fr> rhos;
      for (std::size_t j = 1; j < plan.pair->vars.size(); ++j)
        rhos.push_back(ps.rho[plan.pair->vars[j]]);
      const G2 m = sig_message_point(c, ps.rho[plan.pair->vars[0]], rhos);
      const GT a_hat = group::pair(c.randomized.s1, m.to_affine());
      std::uint8_t buf[384];
      group::gt_to_bytes(a_hat, buf);
      bytes.insert(bytes.end(), buf, buf + 384);
    }
  }
  return ps;
}

// Completes the proof for a given challenge (Fiat-Shamir or injected).
Proof answer_challenge(const Witness& w, const ProverState& ps,
                       const Fr& challenge) {
  Proof proof;
  proof.challenge = challenge;
  proof.parts.resize(ps.lo.plans.size());
  for (std::size_t ci = 0; ci < ps.lo.plans.size(); ++ci) {
    const ClausePlan& plan = ps.lo.plans[ci];
    Proof::ClausePart& part = proof.parts[ci];
    part.tag = plan.tag;
    part.first_round = ps.rounds[ci];
    if (!plan.bits.empty()) {
      const auto& br = w.range.at(ci).bit_rand;
      for (std::size_t k = 0; k < plan.bits.size(); ++k) {
        const BitLocal& loc = ps.bit_locals[ci][k];
        const Fr c_true = challenge - loc.c_false;
        const Fr z_true = loc.rho_true + c_true * br[k];
        // serialized as (challenge share of branch 0, z_0, z_1)
        if (loc.bit == 0) {
          part.responses.insert(part.responses.end(), {c_true, z_true, loc.z_false});
        } else {
          part.responses.insert(part.responses.end(), {loc.c_false, loc.z_false, z_true});
        }
      }
    }
    for (const std::size_t var : plan.owned)
      part.responses.push_back(ps.rho[var] + challenge * ps.val[var]);
  }
  return proof;
}

// ---------------------------------------------------------------------------
// Verification (shared by verify and verify_equations)

bool verify_inner(const Statement& st, const Proof& proof,
                  std::span<const std::uint8_t> context, bool check_hash) {
  Lowered lo;
  try {
    lo = lower(st);
  } catch (const std::invalid_argument&) {
    return false;
  }
  if (proof.parts.size() != lo.plans.size()) return false;

  // collect the response scalar for every variable root
  std::vector<Fr> z(lo.n_total);
  std::vector<char> have(lo.n_total, 0);
  for (std::size_t ci = 0; ci < lo.plans.size(); ++ci) {
    const ClausePlan& plan = lo.plans[ci];
    const Proof::ClausePart& part = proof.parts[ci];
    if (part.tag != plan.tag || part.first_round.size() != plan.first_round_size ||
        part.responses.size() != plan.response_count())
      return false;
    for (std::size_t i = 0; i < plan.owned.size(); ++i) {
      z[plan.owned[i]] = part.responses[3 * plan.bits.size() + i];
      have[plan.owned[i]] = 1;
    }
  }

  const Fr& c = proof.challenge;
  if (check_hash) {
    std::vector<std::uint8_t> rounds;
    for (const Proof::ClausePart& part : proof.parts)
      rounds.insert(rounds.end(), part.first_round.begin(), part.first_round.end());
    if (fs_challenge(context, st.serialize(), rounds) != c) return false;
  }

  const auto& gb = sign::pedersen_bases();
  const G1Affine& h = gb.h;
  const G1Affine& gm = gb.g[0];

  for (std::size_t ci = 0; ci < lo.plans.size(); ++ci) {
    const ClausePlan& plan = lo.plans[ci];
    const Proof::ClausePart& part = proof.parts[ci];
    std::size_t off = 0;
    auto next_g1 = [&](G1Affine* out) {
      auto p = group::g1_from_bytes(
          std::span<const std::uint8_t, 32>(part.first_round.data() + off, 32));
      off += 32;
      if (!p) return false;
      *out = *p;
      return true;
    };

    for (std::size_t k = 0; k < plan.bits.size(); ++k) {
      G1Affine a0, a1;
      if (!next_g1(&a0) || !next_g1(&a1)) return false;
      const Fr& c0 = part.responses[3 * k];
      const Fr& z0 = part.responses[3 * k + 1];
      const Fr& z1 = part.responses[3 * k + 2];
      const Fr c1 = c - c0;
      const G1 target0 = G1::from_affine(plan.bits[k].commit);
      const G1 target1 = target0.add(gm.neg());
      if (!(group::fast_mul(h, z0).to_affine() ==
            G1::from_affine(a0).add(target0.mul(c0)).to_affine()))
        return false;
      if (!(group::fast_mul(h, z1).to_affine() ==
            G1::from_affine(a1).add(target1.mul(c1)).to_affine()))
        return false;
    }
    for (const G1Eq& eq : plan.g1) {
      G1Affine a;
      if (!next_g1(&a)) return false;
      G1 lhs = G1::infinity();
      for (const auto& [base, var] : eq.terms) {
        if (!have[var]) return false;
        lhs = lhs.add(group::fast_mul(base, z[var]));
      }
      const G1 rhs = G1::from_affine(a).add(G1::from_affine(eq.target).mul(c));
      if (!(lhs.to_affine() == rhs.to_affine())) return false;
    }
    for (const LinEq& eq : plan.lin) {
      Fr t;
      {
        auto s = Fr::from_bytes(
            std::span<const std::uint8_t, 32>(part.first_round.data() + off, 32));
        off += 32;
        if (!s) return false;
        t = *s;
      }
      Fr sum = Fr::zero();
      for (const auto& [coeff, var] : eq.terms) {
        if (!have[var]) return false;
        sum += coeff * z[var];
      }
      if (sum != t + c * eq.constant) return false;
    }
    if (plan.pair) {
      auto a_hat = group::gt_from_bytes(
          std::span<const std::uint8_t, 384>(part.first_round.data() + off, 384));
      off += 384;
      if (!a_hat) return false;
      const SigPoKClause& cl = *plan.pair->clause;
      for (const std::size_t var : plan.pair->vars)
        if (!have[var]) return false;
      std::vector<Fr> zs;
      for (std::size_t j = 1; j < plan.pair->vars.size(); ++j)
        zs.push_back(z[plan.pair->vars[j]]);
      const G2 m = sig_message_point(cl, z[plan.pair->vars[0]], zs)
                       .add(G2::from_affine(cl.pk.x_tilde).mul(c));
      const G1Affine pts[2] = {
          cl.randomized.s1,
          G1::from_affine(cl.randomized.s2).mul(c).neg().to_affine()};
      const G2Affine rhs[2] = {m.to_affine(), cl.pk.g_tilde};
      if (!(group::multi_pair(pts, rhs) == *a_hat)) return false;
    }
  }
  return true;
}

}  // namespace

Proof prove(const Statement& st, const Witness& w,
            std::span<const std::uint8_t> context, Rng& rng) {
  const ProverState ps = first_round(st, w, rng);
  std::vector<std::uint8_t> rounds;
  for (const auto& r : ps.rounds) rounds.insert(rounds.end(), r.begin(), r.end());
  const Fr challenge = fs_challenge(context, st.serialize(), rounds);
  return answer_challenge(w, ps, challenge);
}

bool verify(const Statement& st, const Proof& proof,
            std::span<const std::uint8_t> context) {
  return verify_inner(st, proof, context, true);
}

bool verify_equations(const Statement& st, const Proof& proof) {
  return verify_inner(st, proof, {}, false);
}

Proof simulate(const Statement& st, Rng& rng) {
  const Lowered lo = lower(st);
  const auto& gb = sign::pedersen_bases();
  const G1Affine& h = gb.h;
  const G1Affine& gm = gb.g[0];

  Proof proof;
  proof.challenge = rng.scalar();
  const Fr& c = proof.challenge;
  std::vector<Fr> z(lo.n_total);
  for (Fr& s : z) s = rng.scalar();

  proof.parts.resize(lo.plans.size());
  for (std::size_t ci = 0; ci < lo.plans.size(); ++ci) {
    const ClausePlan& plan = lo.plans[ci];
    Proof::ClausePart& part = proof.parts[ci];
    part.tag = plan.tag;
    for (const BitOrEq& eq : plan.bits) {
      const Fr c0 = rng.scalar();
      const Fr z0 = rng.scalar();
      const Fr z1 = rng.scalar();
      const Fr c1 = c - c0;
      const G1 target0 = G1::from_affine(eq.commit);
      const G1 target1 = target0.add(gm.neg());
      wire::put_g1(part.first_round,
                   group::fast_mul(h, z0).add(target0.mul(c0).neg()).to_affine());
      wire::put_g1(part.first_round,
                   group::fast_mul(h, z1).add(target1.mul(c1).neg()).to_affine());
      part.responses.insert(part.responses.end(), {c0, z0, z1});
    }
    for (const G1Eq& eq : plan.g1) {
      G1 acc = G1::from_affine(eq.target).mul(c).neg();
      for (const auto& [base, var] : eq.terms)
        acc = acc.add(group::fast_mul(base, z[var]));
      wire::put_g1(part.first_round, acc.to_affine());
    }
    for (const LinEq& eq : plan.lin) {
      Fr t = -(c * eq.constant);
      for (const auto& [coeff, var] : eq.terms) t += coeff * z[var];
      wire::put_fr(part.first_round, t);
    }
    if (plan.pair) {
      const SigPoKClause& cl = *plan.pair->clause;
      std::vector<Fr> zs;
      for (std::size_t j = 1; j < plan.pair->vars.size(); ++j)
        zs.push_back(z[plan.pair->vars[j]]);
      const G2 m = sig_message_point(cl, z[plan.pair->vars[0]], zs)
                       .add(G2::from_affine(cl.pk.x_tilde).mul(c));
      const G1Affine pts[2] = {
          cl.randomized.s1,
          G1::from_affine(cl.randomized.s2).mul(c).neg().to_affine()};
      const G2Affine rhs[2] = {m.to_affine(), cl.pk.g_tilde};
      const GT a_hat = group::multi_pair(pts, rhs);
      std::uint8_t buf[384];
      group::gt_to_bytes(a_hat, buf);
      part.first_round.insert(part.first_round.end(), buf, buf + 384);
    }
    for (const std::size_t var : plan.owned) part.responses.push_back(z[var]);
  }
  return proof;
}

// ---------------------------------------------------------------------------
// Test-only interactive mode

namespace testing {

struct Session::Impl {
  Statement st;
  Witness w;
  ProverState ps;
};

Session::Session(const Statement& st, const Witness& w, Rng& rng)
    : impl_(new Impl{st, w, {}}) {
  // lower against the member copy so clause pointers stay valid
  impl_->ps = first_round(impl_->st, impl_->w, rng);
}

Session::~Session() { delete impl_; }

Proof Session::answer(const Fr& challenge) const {
  return answer_challenge(impl_->w, impl_->ps, challenge);
}

std::optional<std::map<std::size_t, Fr>> extract(const Statement& st,
                                                 const Proof& a, const Proof& b) {
  Lowered lo;
  try {
    lo = lower(st);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
  if (!verify_equations(st, a) || !verify_equations(st, b)) return std::nullopt;
  if (a.challenge == b.challenge) return std::nullopt;
  for (std::size_t ci = 0; ci < a.parts.size(); ++ci)
    if (a.parts[ci].first_round != b.parts[ci].first_round) return std::nullopt;

  const Fr dinv = (a.challenge - b.challenge).inverse();
  std::map<std::size_t, Fr> out;
  for (std::size_t ci = 0; ci < lo.plans.size(); ++ci) {
    const ClausePlan& plan = lo.plans[ci];
    const std::size_t skip = 3 * plan.bits.size();
    for (std::size_t i = 0; i < plan.owned.size(); ++i) {
      const Fr za = a.parts[ci].responses[skip + i];
      const Fr zb = b.parts[ci].responses[skip + i];
      out[plan.owned[i]] = (za - zb) * dinv;
    }
  }
  return out;
}

std::size_t var_root(const Statement& st, SlotRef ref) {
  const Lowered lo = lower(st);
  if (ref.commit >= st.commitments.size() ||
      ref.slot >= st.commitments[ref.commit].arity)
    throw std::invalid_argument("slot reference outside the declared commitments");
  return lo.root[slot_var(lo, ref)];
}

}  // namespace testing

// ---------------------------------------------------------------------------
// StatementBuilder

std::size_t StatementBuilder::add_commitment(std::vector<Fr> messages,
                                             const Fr& randomness) {
  const G1Affine point = sign::pedersen_commit(messages, randomness);
  return add_commitment_point(point, std::move(messages), randomness, {});
}

std::size_t StatementBuilder::add_commitment(std::vector<G1Affine> bases,
                                             std::vector<Fr> messages,
                                             const Fr& randomness) {
  if (bases.size() != messages.size() + 1)
    throw std::invalid_argument("explicit bases must cover randomness plus every slot");
  group::G1 acc = group::fast_mul(bases[0], randomness);
  for (std::size_t j = 0; j < messages.size(); ++j)
    acc = acc.add(group::fast_mul(bases[1 + j], messages[j]));
  return add_commitment_point(acc.to_affine(), std::move(messages), randomness,
                              std::move(bases));
}

std::size_t StatementBuilder::add_commitment_point(const G1Affine& point,
                                                   std::vector<Fr> messages,
                                                   const Fr& randomness,
                                                   std::vector<G1Affine> bases) {
  if (messages.empty() || messages.size() > 0xffff)
    throw std::invalid_argument("commitment needs between 1 and 65535 slots");
  CommitDecl d;
  d.point = point;
  d.arity = static_cast<std::uint16_t>(messages.size());
  d.bases = std::move(bases);
  st_.commitments.push_back(std::move(d));
  w_.messages.push_back(std::move(messages));
  w_.randomness.push_back(randomness);
  return st_.commitments.size() - 1;
}

void StatementBuilder::opening(std::size_t commit) {
  st_.clauses.push_back(OpeningClause{static_cast<std::uint16_t>(commit)});
}

void StatementBuilder::equal(SlotRef a, SlotRef b) {
  st_.clauses.push_back(EqualClause{a, b});
}

void StatementBuilder::linear(std::vector<LinearTerm> terms, const Fr& constant) {
  st_.clauses.push_back(LinearClause{std::move(terms), constant});
}

void StatementBuilder::public_slot(SlotRef slot, const Fr& value) {
  st_.clauses.push_back(PublicSlotClause{slot, value});
}

Fr StatementBuilder::slot_value(SlotRef ref) const {
  if (ref.commit >= w_.messages.size() || ref.slot >= w_.messages[ref.commit].size())
    throw std::invalid_argument("slot reference outside the declared commitments");
  return w_.messages[ref.commit][ref.slot];
}

void StatementBuilder::product(SlotRef k, SlotRef factor, SlotRef target) {
  const auto& gb = sign::pedersen_bases();
  const Fr kv = slot_value(k);
  const Fr fv = slot_value(factor);
  (void)slot_value(target);
  ProductAux aux{rng_.scalar(), rng_.scalar()};
  ProductClause cl;
  cl.k = k;
  cl.factor = factor;
  cl.target = target;
  cl.c_factor = group::fast_mul(gb.h, aux.r_factor)
                    .add(group::fast_mul(gb.g[0], fv))
                    .to_affine();
  cl.c_value = group::G1::from_affine(cl.c_factor)
                   .mul(kv)
                   .add(group::fast_mul(gb.h, aux.r_f))
                   .to_affine();
  w_.product.emplace(st_.clauses.size(), aux);
  st_.clauses.push_back(std::move(cl));
}

void StatementBuilder::range(SlotRef slot, std::uint8_t bits) {
  const auto& gb = sign::pedersen_bases();
  const group::Limbs4 limbs = slot_value(slot).to_limbs();
  RangeAux aux;
  RangeClause cl;
  cl.slot = slot;
  cl.bits = bits;
  for (std::size_t k = 0; k < bits; ++k) {
    const Fr r = rng_.scalar();
    aux.bit_rand.push_back(r);
    group::G1 ck = group::fast_mul(gb.h, r);
    if ((limbs[0] >> k) & 1) ck = ck.add(gb.g[0]);
    cl.bit_commits.push_back(ck.to_affine());
  }
  w_.range.emplace(st_.clauses.size(), std::move(aux));
  st_.clauses.push_back(std::move(cl));
}

sign::PSSignature StatementBuilder::sig_pok(const sign::PSPublicKey& pk,
                                            const sign::PSSignature& sig,
                                            std::vector<SlotRef> slots) {
  SigAux aux{rng_.scalar()};
  const Fr r = rng_.nonzero_scalar();
  const sign::PSSignature randomized = sign::ps_randomize(sig, r, aux.t);
  SigPoKClause cl;
  cl.pk = pk;
  cl.randomized = randomized;
  cl.slots = std::move(slots);
  w_.sig.emplace(st_.clauses.size(), aux);
  st_.clauses.push_back(std::move(cl));
  return randomized;
}

}  // namespace pisces::zk
