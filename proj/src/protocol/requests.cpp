#include "pisces/protocol/requests.hpp"

#include <algorithm>
#include <stdexcept>

#include "pisces/group/fixed_base.hpp"

namespace pisces::protocol {
namespace {

constexpr std::string_view kTxTag = "pisces/tx/v1";

using records::PlatformKeys;
using sign::PSPublicKey;
using sign::PSSignature;
using zk::SlotRef;

void put_u8(std::vector<std::uint8_t>& out, std::uint8_t v) { out.push_back(v); }

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 3; i >= 0; --i)
    out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_fr(std::vector<std::uint8_t>& out, const Fr& s) {
  std::uint8_t buf[32];
  s.to_bytes(buf);
  out.insert(out.end(), buf, buf + 32);
}

void put_g1(std::vector<std::uint8_t>& out, const G1Affine& p) {
  std::uint8_t buf[32];
  group::g1_to_bytes(p, buf);
  out.insert(out.end(), buf, buf + 32);
}

void put_blob(std::vector<std::uint8_t>& out,
              const std::vector<std::uint8_t>& blob) {
  put_u32(out, static_cast<std::uint32_t>(blob.size()));
  out.insert(out.end(), blob.begin(), blob.end());
}

// Field reader for the variable-length request layouts; every read is
// reported to the optional FieldView so tests can audit what a handler saw.
struct Cursor {
  std::span<const std::uint8_t> in;
  FieldView* view = nullptr;
  std::size_t off = 0;
  bool ok = true;

  bool need(std::size_t n) {
    if (!ok || in.size() - off < n) ok = false;
    return ok;
  }
  void note(std::string_view name, std::size_t len) {
    if (view) view->note(name, len);
  }
  std::uint8_t u8(std::string_view name) {
    if (!need(1)) return 0;
    note(name, 1);
    return in[off++];
  }
  std::uint32_t u32(std::string_view name) {
    if (!need(4)) return 0;
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | in[off + i];
    off += 4;
    note(name, 4);
    return v;
  }
  Fr fr(std::string_view name) {
    if (!need(32)) return Fr::zero();
    auto v = Fr::from_bytes(std::span<const std::uint8_t, 32>(in.data() + off, 32));
    off += 32;
    if (!v) {
      ok = false;
      return Fr::zero();
    }
    note(name, 32);
    return *v;
  }
  G1Affine g1(std::string_view name) {
    if (!need(32)) return G1Affine::infinity();
    auto p = group::g1_from_bytes(
        std::span<const std::uint8_t, 32>(in.data() + off, 32));
    off += 32;
    if (!p) {
      ok = false;
      return G1Affine::infinity();
    }
    note(name, 32);
    return *p;
  }
  std::vector<std::uint8_t> blob(std::string_view name) {
    if (!need(4)) return {};
    std::uint32_t len = 0;
    for (int i = 0; i < 4; ++i) len = (len << 8) | in[off + i];
    off += 4;
    if (!need(len)) return {};
    std::vector<std::uint8_t> out(in.begin() + static_cast<std::ptrdiff_t>(off),
                                  in.begin() + static_cast<std::ptrdiff_t>(off + len));
    off += len;
    note(name, 4 + static_cast<std::size_t>(len));
    return out;
  }
  std::string str8(std::string_view name) {
    if (!need(1)) return {};
    const std::size_t len = in[off++];
    if (!need(len)) return {};
    std::string out(reinterpret_cast<const char*>(in.data() + off), len);
    off += len;
    note(name, 1 + len);
    return out;
  }
  bool done() const { return ok && off == in.size(); }
};

// (g, Y_1..Y_n): the bases a blind-issuance commitment opens under.
std::vector<G1Affine> issue_bases(const PSPublicKey& pk) {
  std::vector<G1Affine> b;
  b.reserve(pk.y_g1.size() + 1);
  b.push_back(pk.g);
  b.insert(b.end(), pk.y_g1.begin(), pk.y_g1.end());
  return b;
}

// upk = g^usk declared as a one-slot commitment with a vacuous randomness
// base: the identity contributes nothing, and the prover uses randomness 0.
std::vector<G1Affine> upk_bases() {
  return {G1Affine::infinity(), group::g1_gen()};
}

// --------------------------------------------------------------------------
// Per-transaction statement shapes, written once and driven by either side:
// CanonicalBuild assembles the verifier's statement by pulling prover-chosen
// elements off the points cursor; ProverSide assembles the same statement
// through zk::StatementBuilder from the witness. Any structural drift
// between prover and verifier is therefore impossible.

class CanonicalBuild {
 public:
  explicit CanonicalBuild(PointCursor& cur) : cur_(cur) {}

  void show(std::uint16_t arity) { declare(arity, {}); }
  void blind(const PSPublicKey& pk) {
    declare(static_cast<std::uint16_t>(pk.slots()), issue_bases(pk));
  }
  void fixed(const G1Affine& point, std::vector<G1Affine> bases) {
    zk::CommitDecl d;
    d.point = point;
    d.arity = static_cast<std::uint16_t>(bases.size() - 1);
    d.bases = std::move(bases);
    st_.commitments.push_back(std::move(d));
  }
  void opening(std::uint16_t commit) {
    st_.clauses.push_back(zk::OpeningClause{commit});
  }
  void equal(SlotRef a, SlotRef b) { st_.clauses.push_back(zk::EqualClause{a, b}); }
  void linear(std::vector<zk::LinearTerm> terms, const Fr& constant) {
    st_.clauses.push_back(zk::LinearClause{std::move(terms), constant});
  }
  void pub_slot(SlotRef slot, const Fr& value) {
    st_.clauses.push_back(zk::PublicSlotClause{slot, value});
  }
  void product(SlotRef k, SlotRef factor, SlotRef target) {
    zk::ProductClause cl;
    cl.k = k;
    cl.factor = factor;
    cl.target = target;
    cl.c_factor = take_point();
    cl.c_value = take_point();
    st_.clauses.push_back(std::move(cl));
  }
  void range(SlotRef slot, std::uint8_t bits) {
    zk::RangeClause cl;
    cl.slot = slot;
    cl.bits = bits;
    cl.bit_commits.reserve(bits);
    for (std::uint8_t k = 0; k < bits; ++k) cl.bit_commits.push_back(take_point());
    st_.clauses.push_back(std::move(cl));
  }
  void sig_pok(const PSPublicKey& pk, std::vector<SlotRef> slots) {
    zk::SigPoKClause cl;
    cl.pk = pk;
    if (auto s = cur_.sig())
      cl.randomized = *s;
    else
      ok_ = false;
    cl.slots = std::move(slots);
    st_.clauses.push_back(std::move(cl));
  }

  // the finished statement, provided every element decoded and the points
  // section held exactly the elements the shape consumed
  std::optional<zk::Statement> take() {
    if (!ok_ || !cur_.done()) return std::nullopt;
    return std::move(st_);
  }

 private:
  void declare(std::uint16_t arity, std::vector<G1Affine> bases) {
    zk::CommitDecl d;
    d.point = take_point();
    d.arity = arity;
    d.bases = std::move(bases);
    st_.commitments.push_back(std::move(d));
  }
  G1Affine take_point() {
    if (auto p = cur_.point()) return *p;
    ok_ = false;
    return G1Affine::infinity();
  }

  PointCursor& cur_;
  zk::Statement st_;
  bool ok_ = true;
};

// pre-arranged opening for one commitment the prover is about to declare
struct Prep {
  std::vector<Fr> messages;
  Fr randomness;
};

class ProverSide {
 public:
  ProverSide(Rng& rng, std::vector<Prep> commits, std::vector<PSSignature> sigs)
      : sb_(rng), commits_(std::move(commits)), sigs_(std::move(sigs)) {}

  void show(std::uint16_t arity) {
    Prep p = next_commit(arity);
    sb_.add_commitment(std::move(p.messages), p.randomness);
  }
  void blind(const PSPublicKey& pk) {
    Prep p = next_commit(static_cast<std::uint16_t>(pk.slots()));
    sb_.add_commitment(issue_bases(pk), std::move(p.messages), p.randomness);
  }
  void fixed(const G1Affine& point, std::vector<G1Affine> bases) {
    Prep p = next_commit(static_cast<std::uint16_t>(bases.size() - 1));
    sb_.add_commitment_point(point, std::move(p.messages), p.randomness,
                             std::move(bases));
  }
  void opening(std::uint16_t commit) { sb_.opening(commit); }
  void equal(SlotRef a, SlotRef b) { sb_.equal(a, b); }
  void linear(std::vector<zk::LinearTerm> terms, const Fr& constant) {
    sb_.linear(std::move(terms), constant);
  }
  void pub_slot(SlotRef slot, const Fr& value) { sb_.public_slot(slot, value); }
  void product(SlotRef k, SlotRef factor, SlotRef target) {
    sb_.product(k, factor, target);
  }
  void range(SlotRef slot, std::uint8_t bits) { sb_.range(slot, bits); }
  void sig_pok(const PSPublicKey& pk, std::vector<SlotRef> slots) {
    if (next_sig_ >= sigs_.size())
      throw std::invalid_argument("missing signature for a proof clause");
    sb_.sig_pok(pk, sigs_[next_sig_++], std::move(slots));
  }

  zk::StatementBuilder& builder() { return sb_; }

 private:
  Prep next_commit(std::uint16_t arity) {
    if (next_commit_ >= commits_.size() ||
        commits_[next_commit_].messages.size() != arity)
      throw std::invalid_argument("commitment openings do not match the shape");
    return std::move(commits_[next_commit_++]);
  }

  zk::StatementBuilder sb_;
  std::vector<Prep> commits_;
  std::vector<PSSignature> sigs_;
  std::size_t next_commit_ = 0;
  std::size_t next_sig_ = 0;
};

// --- join: prove upk = g^usk and blind-commit a zero-counter registration
//
// commitments: 0 upk point (usk), 1 C_reg (usk, rid, cp1, cp2)
template <class B>
void join_shape(B& b, const PlatformKeys& keys, const JoinPublic& pub) {
  b.fixed(pub.upk, upk_bases());
  b.blind(keys.registration);
  b.opening(0);
  b.opening(1);
  b.equal({0, 0}, {1, 0});                // same usk behind upk and C_reg
  b.pub_slot({1, 2}, Fr::zero());         // cp1 = 0
  b.pub_slot({1, 3}, Fr::zero());         // cp2 = 0
}

// --- deposit: show the registration, blind-commit the new asset record with
// its public name/amount/price pinned
//
// commitments: 0 registration show (usk, rid, cp1, cp2),
//              1 C_asset (usk, aid, name, amt, price)
template <class B>
void deposit_shape(B& b, const PlatformKeys& keys, const DepositPublic& pub) {
  b.show(4);
  b.blind(keys.asset);
  b.opening(0);
  b.opening(1);
  b.sig_pok(keys.registration, {{0, 0}, {0, 1}, {0, 2}, {0, 3}});
  b.equal({0, 0}, {1, 0});
  b.pub_slot({1, 2}, Fr::from_u64(pub.name));
  b.pub_slot({1, 3}, Fr::from_u64(pub.amt));
  b.pub_slot({1, 4}, Fr::from_u64(pub.price));
}

// --- exchange: spend one registration and one asset record, reissue both
// plus the bought asset, and accrue compliance counters
//
// commitments:
//   0 registration show (usk, rid, cp1, cp2)
//   1 asset show       (usk, aid, name_i, v_i, px_i)
//   2 C_reg*           (usk, rid*, cp1*, cp2*)
//   3 C_left           (usk, aid_left, name_i, v_i*, px_i)
//   4 C_new            (usk, aid_new, name_j, k_j, px̄_j)
//   5 price-i show     (epoch, name_i, px̄_i)
//   6 price-j show     (epoch, name_j, px̄_j)
//   7 aux: fiat indicator (δ, w, a) with a = name_i − 1, δ = [name_i ≠ 1]
//   8 aux: (k_i)
//   9 aux: (pf1, pf2, d1, d2, pf_in, k_j−1) where pf1 = k_i·px_i,
//     pf2 = k_i·px̄_i, d1 = δ·pf1, d2 = δ·pf2, pf_in = k_j·px̄_j
//
// The δ indicator makes cost/gain accrual skip the fiat asset inside the
// proof without revealing which asset was sold: the range and two product
// clauses force δ = 0 exactly when name_i = 1, and d1/d2 switch the accrual
// on δ. Fairness (pf2 = pf_in) always binds, fiat or not.
template <class B>
void exchange_shape(B& b, const PlatformKeys& keys, const ExchangePublic& pub) {
  const Fr one = Fr::one();
  const Fr epoch = Fr::from_u64(pub.epoch);

  b.show(4);
  b.show(5);
  b.blind(keys.registration);
  b.blind(keys.asset);
  b.blind(keys.asset);
  b.show(3);
  b.show(3);
  b.show(3);
  b.show(1);
  b.show(6);
  for (std::uint16_t c = 0; c < 10; ++c) b.opening(c);
  b.sig_pok(keys.registration, {{0, 0}, {0, 1}, {0, 2}, {0, 3}});
  b.sig_pok(keys.asset, {{1, 0}, {1, 1}, {1, 2}, {1, 3}, {1, 4}});
  b.sig_pok(keys.price, {{5, 0}, {5, 1}, {5, 2}});
  b.sig_pok(keys.price, {{6, 0}, {6, 1}, {6, 2}});
  b.pub_slot({0, 1}, pub.rid);
  b.pub_slot({1, 1}, pub.aid);
  b.pub_slot({5, 0}, epoch);
  b.pub_slot({6, 0}, epoch);
  b.equal({0, 0}, {1, 0});  // one usk across everything reissued
  b.equal({0, 0}, {2, 0});
  b.equal({0, 0}, {3, 0});
  b.equal({0, 0}, {4, 0});
  b.equal({1, 2}, {3, 2});  // leftover keeps name_i
  b.equal({1, 2}, {5, 1});  // price credential i quotes name_i
  b.equal({1, 4}, {3, 4});  // leftover keeps the buying price
  b.equal({4, 2}, {6, 1});  // new record's name matches credential j
  b.equal({4, 4}, {6, 2});  // new record buys at the current price of j
  b.linear({{one, {1, 3}}, {-one, {8, 0}}, {-one, {3, 3}}}, Fr::zero());
  b.range({8, 0}, 32);      // k_i
  b.range({3, 3}, 32);      // leftover amount v_i*
  b.linear({{one, {7, 2}}, {-one, {1, 2}}}, -one);  // a = name_i − 1
  b.range({7, 0}, 1);       // δ is a bit
  b.product({7, 0}, {7, 2}, {7, 2});  // a = δ·a   (δ = 0 forces a = 0)
  b.product({7, 1}, {7, 2}, {7, 0});  // δ = w·a   (a = 0 forces δ = 0)
  b.product({8, 0}, {1, 4}, {9, 0});  // pf1 = k_i·px_i
  b.product({8, 0}, {5, 2}, {9, 1});  // pf2 = k_i·px̄_i
  b.product({7, 0}, {9, 0}, {9, 2});  // d1 = δ·pf1
  b.product({7, 0}, {9, 1}, {9, 3});  // d2 = δ·pf2
  b.linear({{one, {2, 2}}, {-one, {0, 2}}, {-one, {9, 2}}}, Fr::zero());
  b.linear({{one, {2, 3}}, {-one, {0, 3}}, {-one, {9, 3}}}, Fr::zero());
  b.product({4, 3}, {4, 4}, {9, 4});  // pf_in = k_j·px̄_j
  b.linear({{one, {9, 1}}, {-one, {9, 4}}}, Fr::zero());  // fairness
  b.linear({{one, {9, 5}}, {-one, {4, 3}}}, -one);        // k_j − 1
  b.range({9, 5}, 32);      // k_j − 1 >= 0, so k_j >= 1
  b.range({4, 3}, 32);      // and k_j < 2^32
}

// --- withdraw: like an exchange out-leg with public name and amount, no new
// asset; accrual constants are public so no indicator gadget is needed
//
// commitments: 0 registration show, 1 asset show, 2 C_reg*, 3 C_left
template <class B>
void withdraw_shape(B& b, const PlatformKeys& keys, const WithdrawPublic& pub,
                    std::uint32_t current_price) {
  const Fr one = Fr::one();
  const Fr k = Fr::from_u64(pub.amt);
  const bool fiat = pub.name == kFiatIndex;

  b.show(4);
  b.show(5);
  b.blind(keys.registration);
  b.blind(keys.asset);
  for (std::uint16_t c = 0; c < 4; ++c) b.opening(c);
  b.sig_pok(keys.registration, {{0, 0}, {0, 1}, {0, 2}, {0, 3}});
  b.sig_pok(keys.asset, {{1, 0}, {1, 1}, {1, 2}, {1, 3}, {1, 4}});
  b.pub_slot({0, 1}, pub.rid);
  b.pub_slot({1, 1}, pub.aid);
  b.pub_slot({1, 2}, Fr::from_u64(pub.name));
  b.pub_slot({3, 2}, Fr::from_u64(pub.name));    // leftover keeps the name
  b.equal({0, 0}, {1, 0});
  b.equal({0, 0}, {2, 0});
  b.equal({0, 0}, {3, 0});
  b.equal({1, 4}, {3, 4});                       // buying price carried over
  b.linear({{one, {1, 3}}, {-one, {3, 3}}}, k);  // v_i − v_i* = k
  b.range({3, 3}, 32);
  // cost accrues k·px_i (hidden buying price), gain k·px̄_i (public current
  // price); withdrawing fiat accrues nothing
  std::vector<zk::LinearTerm> cost{{one, {2, 2}}, {-one, {0, 2}}};
  if (!fiat) cost.push_back({-k, {1, 4}});
  b.linear(std::move(cost), Fr::zero());
  const Fr gain = fiat ? Fr::zero() : k * Fr::from_u64(current_price);
  b.linear({{one, {2, 3}}, {-one, {0, 3}}}, gain);
}

// --- file: reveal upk and rid, reset the registration's counters, and have
// the platform certify the totals as a compliance document
//
// commitments: 0 registration show, 1 upk point, 2 C_reg reset (counters 0),
//              3 C_doc (H(upk), cp1, cp2, au) under the document key
template <class B>
void file_shape(B& b, const PlatformKeys& keys, const FilePublic& pub) {
  const Fr hupk = records::upk_to_scalar(pub.upk);

  b.show(4);
  b.fixed(pub.upk, upk_bases());
  b.blind(keys.registration);
  b.blind(keys.doc);
  for (std::uint16_t c = 0; c < 4; ++c) b.opening(c);
  b.sig_pok(keys.registration, {{0, 0}, {0, 1}, {0, 2}, {0, 3}});
  b.pub_slot({0, 1}, pub.rid);
  b.equal({0, 0}, {1, 0});  // the revealed upk belongs to this registration
  b.equal({0, 0}, {2, 0});
  b.pub_slot({2, 2}, Fr::zero());
  b.pub_slot({2, 3}, Fr::zero());
  b.pub_slot({3, 0}, hupk);
  b.equal({3, 1}, {0, 2});  // document certifies exactly the shown counters
  b.equal({3, 2}, {0, 3});
  b.pub_slot({3, 3}, Fr::from_u64(pub.au));
}

// --------------------------------------------------------------------------
// Points-section collection (prover side): commitment points in declaration
// order minus the ones derived from revealed fields, then per-clause

std::vector<std::uint8_t> collect_points(const zk::Statement& st,
                                         std::initializer_list<std::size_t> skip) {
  std::vector<std::uint8_t> out;
  for (std::size_t i = 0; i < st.commitments.size(); ++i) {
    if (std::find(skip.begin(), skip.end(), i) != skip.end()) continue;
    put_g1(out, st.commitments[i].point);
  }
  for (const auto& cl : st.clauses) {
    if (const auto* p = std::get_if<zk::ProductClause>(&cl)) {
      put_g1(out, p->c_factor);
      put_g1(out, p->c_value);
    } else if (const auto* r = std::get_if<zk::RangeClause>(&cl)) {
      for (const auto& bc : r->bit_commits) put_g1(out, bc);
    } else if (const auto* s = std::get_if<zk::SigPoKClause>(&cl)) {
      put_g1(out, s->randomized.s1);
      put_g1(out, s->randomized.s2);
    }
  }
  return out;
}

// Rebuild the statement through the verifier path and insist on identical
// bytes before proving. A mismatch is an implementation bug, never bad input.
template <class Rebuild>
void cross_check(const zk::Statement& built, const std::vector<std::uint8_t>& pts,
                 Rebuild rebuild) {
  PointCursor cur(pts);
  const std::optional<zk::Statement> expect = rebuild(cur);
  if (!expect || expect->serialize() != built.serialize())
    throw std::logic_error("prover and verifier disagree on the statement");
}

}  // namespace

std::vector<std::uint8_t> tx_context(std::uint8_t type, std::uint32_t epoch) {
  std::vector<std::uint8_t> out(kTxTag.begin(), kTxTag.end());
  out.push_back(type);
  put_u32(out, epoch);
  return out;
}

std::optional<G1Affine> PointCursor::point() {
  if (in_.size() - off_ < 32) return std::nullopt;
  auto p = group::g1_from_bytes(
      std::span<const std::uint8_t, 32>(in_.data() + off_, 32));
  if (!p) return std::nullopt;
  off_ += 32;
  return p;
}

std::optional<sign::PSSignature> PointCursor::sig() {
  sign::PSSignature s;
  if (auto p = point())
    s.s1 = *p;
  else
    return std::nullopt;
  if (auto p = point())
    s.s2 = *p;
  else
    return std::nullopt;
  return s;
}

std::optional<zk::Statement> join_statement(const PlatformKeys& keys,
                                            const JoinPublic& pub,
                                            PointCursor& cur) {
  CanonicalBuild b(cur);
  join_shape(b, keys, pub);
  return b.take();
}

std::optional<zk::Statement> deposit_statement(const PlatformKeys& keys,
                                               const DepositPublic& pub,
                                               PointCursor& cur) {
  CanonicalBuild b(cur);
  deposit_shape(b, keys, pub);
  return b.take();
}

std::optional<zk::Statement> exchange_statement(const PlatformKeys& keys,
                                                const ExchangePublic& pub,
                                                PointCursor& cur) {
  CanonicalBuild b(cur);
  exchange_shape(b, keys, pub);
  return b.take();
}

std::optional<zk::Statement> withdraw_statement(const PlatformKeys& keys,
                                                const WithdrawPublic& pub,
                                                std::uint32_t current_price,
                                                PointCursor& cur) {
  CanonicalBuild b(cur);
  withdraw_shape(b, keys, pub, current_price);
  return b.take();
}

std::optional<zk::Statement> file_statement(const PlatformKeys& keys,
                                            const FilePublic& pub,
                                            PointCursor& cur) {
  CanonicalBuild b(cur);
  file_shape(b, keys, pub);
  return b.take();
}

JoinRequest build_join(const PlatformKeys& keys, std::uint32_t epoch,
                       const Fr& usk, const Fr& rid, const Fr& t_reg, Rng& rng) {
  JoinPublic pub{epoch, records::compute_upk(usk)};
  ProverSide p(rng,
               {Prep{{usk}, Fr::zero()},
                Prep{{usk, rid, Fr::zero(), Fr::zero()}, t_reg}},
               {});
  join_shape(p, keys, pub);
  const auto pts = collect_points(p.builder().statement(), {0});
  cross_check(p.builder().statement(), pts, [&](PointCursor& cur) {
    return join_statement(keys, pub, cur);
  });
  return JoinRequest{pub, pts,
                     p.builder().prove(tx_context(kTagJoin, epoch)).serialize()};
}

DepositRequest build_deposit(const PlatformKeys& keys, const DepositPublic& pub,
                             const records::RegistrationRecord& reg,
                             const Fr& aid, const Fr& t_asset, Rng& rng) {
  ProverSide p(rng,
               {Prep{reg.messages(), rng.scalar()},
                Prep{{reg.usk, aid, Fr::from_u64(pub.name), Fr::from_u64(pub.amt),
                      Fr::from_u64(pub.price)},
                     t_asset}},
               {reg.sig});
  deposit_shape(p, keys, pub);
  const auto pts = collect_points(p.builder().statement(), {});
  cross_check(p.builder().statement(), pts, [&](PointCursor& cur) {
    return deposit_statement(keys, pub, cur);
  });
  return DepositRequest{
      pub, pts, p.builder().prove(tx_context(kTagDeposit, pub.epoch)).serialize()};
}

ExchangeRequest build_exchange(const PlatformKeys& keys, std::uint32_t epoch,
                               const ExchangeSecrets& s, Rng& rng) {
  const Fr one = Fr::one();
  const Fr usk = s.reg.usk;
  const Fr name_i = s.asset.name;
  const bool fiat = name_i == Fr::from_u64(kFiatIndex);
  const Fr k_i = Fr::from_u64(s.k_i);
  const Fr k_j = Fr::from_u64(s.k_j);
  const Fr pf1 = k_i * s.asset.price;
  const Fr pf2 = k_i * s.price_i.pr;
  const Fr delta = fiat ? Fr::zero() : one;
  const Fr a = name_i - one;
  const Fr w = fiat ? Fr::zero() : a.inverse();
  const Fr d1 = fiat ? Fr::zero() : pf1;
  const Fr d2 = fiat ? Fr::zero() : pf2;
  const Fr pf_in = k_j * s.price_j.pr;
  const Fr v_left = s.asset.amt - k_i;

  ExchangePublic pub{epoch, s.reg.rid, s.asset.aid};
  ProverSide p(
      rng,
      {Prep{s.reg.messages(), rng.scalar()},
       Prep{s.asset.messages(), rng.scalar()},
       Prep{{usk, s.rid_new, s.reg.cp1 + d1, s.reg.cp2 + d2}, s.t_reg},
       Prep{{usk, s.aid_left, name_i, v_left, s.asset.price}, s.t_left},
       Prep{{usk, s.aid_new, s.price_j.name, k_j, s.price_j.pr}, s.t_new},
       Prep{s.price_i.messages(), rng.scalar()},
       Prep{s.price_j.messages(), rng.scalar()},
       Prep{{delta, w, a}, rng.scalar()},
       Prep{{k_i}, rng.scalar()},
       Prep{{pf1, pf2, d1, d2, pf_in, k_j - one}, rng.scalar()}},
      {s.reg.sig, s.asset.sig, s.price_i.sig, s.price_j.sig});
  exchange_shape(p, keys, pub);
  const auto pts = collect_points(p.builder().statement(), {});
  cross_check(p.builder().statement(), pts, [&](PointCursor& cur) {
    return exchange_statement(keys, pub, cur);
  });
  return ExchangeRequest{
      pub, pts, p.builder().prove(tx_context(kTagExchange, epoch)).serialize()};
}

WithdrawRequest build_withdraw(const PlatformKeys& keys, std::uint32_t epoch,
                               const WithdrawSecrets& s, Rng& rng) {
  const Fr usk = s.reg.usk;
  const bool fiat = s.asset.name == Fr::from_u64(kFiatIndex);
  const Fr k = Fr::from_u64(s.k);
  const Fr cost = fiat ? Fr::zero() : k * s.asset.price;
  const Fr gain = fiat ? Fr::zero() : k * Fr::from_u64(s.current_price);
  const Fr v_left = s.asset.amt - k;

  WithdrawPublic pub{epoch, 0, s.k, s.reg.rid, s.asset.aid, s.address};
  {
    // the asset name is public; recover the index from the record scalar
    const group::Limbs4 l = s.asset.name.to_limbs();
    pub.name = static_cast<std::uint32_t>(l[0]);
  }
  ProverSide p(rng,
               {Prep{s.reg.messages(), rng.scalar()},
                Prep{s.asset.messages(), rng.scalar()},
                Prep{{usk, s.rid_new, s.reg.cp1 + cost, s.reg.cp2 + gain}, s.t_reg},
                Prep{{usk, s.aid_left, s.asset.name, v_left, s.asset.price},
                     s.t_left}},
               {s.reg.sig, s.asset.sig});
  withdraw_shape(p, keys, pub, s.current_price);
  const auto pts = collect_points(p.builder().statement(), {});
  cross_check(p.builder().statement(), pts, [&](PointCursor& cur) {
    return withdraw_statement(keys, pub, s.current_price, cur);
  });
  return WithdrawRequest{
      pub, pts, p.builder().prove(tx_context(kTagWithdraw, epoch)).serialize()};
}

FileRequest build_file(const PlatformKeys& keys, std::uint32_t epoch,
                       const FileSecrets& s, Rng& rng) {
  const Fr usk = s.reg.usk;
  FilePublic pub{epoch, s.au, records::compute_upk(usk), s.reg.rid};
  const Fr hupk = records::upk_to_scalar(pub.upk);
  ProverSide p(rng,
               {Prep{s.reg.messages(), rng.scalar()},
                Prep{{usk}, Fr::zero()},
                Prep{{usk, s.rid_new, Fr::zero(), Fr::zero()}, s.t_reg},
                Prep{{hupk, s.reg.cp1, s.reg.cp2, Fr::from_u64(s.au)}, s.t_doc}},
               {s.reg.sig});
  file_shape(p, keys, pub);
  const auto pts = collect_points(p.builder().statement(), {1});
  cross_check(p.builder().statement(), pts, [&](PointCursor& cur) {
    return file_statement(keys, pub, cur);
  });
  return FileRequest{pub, pts,
                     p.builder().prove(tx_context(kTagFile, epoch)).serialize()};
}

// --------------------------------------------------------------------------
// Request wire

std::vector<std::uint8_t> JoinRequest::serialize() const {
  std::vector<std::uint8_t> out;
  put_u8(out, kTagJoin);
  put_u32(out, pub.epoch);
  put_g1(out, pub.upk);
  put_blob(out, points);
  put_blob(out, proof);
  return out;
}

std::optional<JoinRequest> JoinRequest::deserialize(
    std::span<const std::uint8_t> in, FieldView* view) {
  Cursor c{in, view};
  JoinRequest r;
  if (c.u8("type") != kTagJoin) return std::nullopt;
  r.pub.epoch = c.u32("epoch");
  r.pub.upk = c.g1("upk");
  r.points = c.blob("points");
  r.proof = c.blob("proof");
  if (!c.done()) return std::nullopt;
  return r;
}

std::vector<std::uint8_t> DepositRequest::serialize() const {
  std::vector<std::uint8_t> out;
  put_u8(out, kTagDeposit);
  put_u32(out, pub.epoch);
  put_u32(out, pub.name);
  put_u32(out, pub.amt);
  put_u32(out, pub.price);
  put_blob(out, points);
  put_blob(out, proof);
  return out;
}

std::optional<DepositRequest> DepositRequest::deserialize(
    std::span<const std::uint8_t> in, FieldView* view) {
  Cursor c{in, view};
  DepositRequest r;
  if (c.u8("type") != kTagDeposit) return std::nullopt;
  r.pub.epoch = c.u32("epoch");
  r.pub.name = c.u32("name");
  r.pub.amt = c.u32("amt");
  r.pub.price = c.u32("price");
  r.points = c.blob("points");
  r.proof = c.blob("proof");
  if (!c.done()) return std::nullopt;
  return r;
}

std::vector<std::uint8_t> ExchangeRequest::serialize() const {
  std::vector<std::uint8_t> out;
  put_u8(out, kTagExchange);
  put_u32(out, pub.epoch);
  put_fr(out, pub.rid);
  put_fr(out, pub.aid);
  put_blob(out, points);
  put_blob(out, proof);
  return out;
}

std::optional<ExchangeRequest> ExchangeRequest::deserialize(
    std::span<const std::uint8_t> in, FieldView* view) {
  Cursor c{in, view};
  ExchangeRequest r;
  if (c.u8("type") != kTagExchange) return std::nullopt;
  r.pub.epoch = c.u32("epoch");
  r.pub.rid = c.fr("rid");
  r.pub.aid = c.fr("aid");
  r.points = c.blob("points");
  r.proof = c.blob("proof");
  if (!c.done()) return std::nullopt;
  return r;
}

std::vector<std::uint8_t> WithdrawRequest::serialize() const {
  std::vector<std::uint8_t> out;
  put_u8(out, kTagWithdraw);
  put_u32(out, pub.epoch);
  put_u32(out, pub.name);
  put_u32(out, pub.amt);
  put_fr(out, pub.rid);
  put_fr(out, pub.aid);
  if (pub.address.size() > 255)
    throw std::invalid_argument("settlement address exceeds 255 bytes");
  put_u8(out, static_cast<std::uint8_t>(pub.address.size()));
  out.insert(out.end(), pub.address.begin(), pub.address.end());
  put_blob(out, points);
  put_blob(out, proof);
  return out;
}

std::optional<WithdrawRequest> WithdrawRequest::deserialize(
    std::span<const std::uint8_t> in, FieldView* view) {
  Cursor c{in, view};
  WithdrawRequest r;
  if (c.u8("type") != kTagWithdraw) return std::nullopt;
  r.pub.epoch = c.u32("epoch");
  r.pub.name = c.u32("name");
  r.pub.amt = c.u32("amt");
  r.pub.rid = c.fr("rid");
  r.pub.aid = c.fr("aid");
  r.pub.address = c.str8("address");
  r.points = c.blob("points");
  r.proof = c.blob("proof");
  if (!c.done()) return std::nullopt;
  return r;
}

std::vector<std::uint8_t> FileRequest::serialize() const {
  std::vector<std::uint8_t> out;
  put_u8(out, kTagFile);
  put_u32(out, pub.epoch);
  put_u32(out, pub.au);
  put_g1(out, pub.upk);
  put_fr(out, pub.rid);
  put_blob(out, points);
  put_blob(out, proof);
  return out;
}

std::optional<FileRequest> FileRequest::deserialize(
    std::span<const std::uint8_t> in, FieldView* view) {
  Cursor c{in, view};
  FileRequest r;
  if (c.u8("type") != kTagFile) return std::nullopt;
  r.pub.epoch = c.u32("epoch");
  r.pub.au = c.u32("au");
  r.pub.upk = c.g1("upk");
  r.pub.rid = c.fr("rid");
  r.points = c.blob("points");
  r.proof = c.blob("proof");
  if (!c.done()) return std::nullopt;
  return r;
}

std::optional<std::uint8_t> request_type(std::span<const std::uint8_t> in) {
  if (in.empty()) return std::nullopt;
  return in[0];
}

// --------------------------------------------------------------------------
// Responses

std::string_view error_string(Error e) {
  switch (e) {
    case Error::ok:
      return "ok";
    case Error::invalid_request:
      return "invalid request";
    case Error::invalid_proof:
      return "invalid proof";
    case Error::double_spend:
      return "double spend";
    case Error::stale_epoch:
      return "stale epoch";
    case Error::already_registered:
      return "already registered";
    case Error::settlement_mismatch:
      return "settlement mismatch";
    case Error::stale_au:
      return "stale au";
    case Error::unregistered:
      return "unregistered";
  }
  return "unknown error";
}

std::vector<std::uint8_t> Response::serialize() const {
  std::vector<std::uint8_t> out;
  put_u8(out, static_cast<std::uint8_t>(error));
  if (error == Error::ok) {
    put_u8(out, static_cast<std::uint8_t>(sigs.size()));
    for (const auto& s : sigs) {
      put_g1(out, s.s1);
      put_g1(out, s.s2);
    }
  } else {
    put_u16(out, static_cast<std::uint16_t>(message.size()));
    out.insert(out.end(), message.begin(), message.end());
  }
  return out;
}

std::optional<Response> Response::deserialize(std::span<const std::uint8_t> in) {
  Cursor c{in, nullptr};
  Response r;
  const std::uint8_t code = c.u8("error");
  if (code > static_cast<std::uint8_t>(Error::unregistered)) return std::nullopt;
  r.error = static_cast<Error>(code);
  if (r.error == Error::ok) {
    const std::uint8_t count = c.u8("count");
    if (count > 8) return std::nullopt;
    for (std::uint8_t i = 0; i < count; ++i) {
      sign::PSSignature s;
      s.s1 = c.g1("s1");
      s.s2 = c.g1("s2");
      r.sigs.push_back(s);
    }
  } else {
    if (!c.need(2)) return std::nullopt;
    std::uint16_t len = static_cast<std::uint16_t>((c.in[c.off] << 8) | c.in[c.off + 1]);
    c.off += 2;
    if (!c.need(len)) return std::nullopt;
    r.message.assign(reinterpret_cast<const char*>(c.in.data() + c.off), len);
    c.off += len;
  }
  if (!c.done()) return std::nullopt;
  return r;
}

}  // namespace pisces::protocol
