#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <gmp.h>

#include <array>
#include <cctype>
#include <random>

#include "pisces/group/curve.hpp"
#include "pisces/group/hash.hpp"
#include "pisces/group/pairing.hpp"
#include "pisces/group/rng.hpp"
#include "test_util.hpp"

using namespace pisces::group;
using testutil::from_hex;
using testutil::to_hex;

namespace {

std::string g1_hex(const G1Affine& a) {
  std::uint8_t buf[32];
  g1_to_bytes(a, buf);
  return to_hex(buf, 32);
}

std::string g2_hex(const G2Affine& a) {
  std::uint8_t buf[64];
  g2_to_bytes(a, buf);
  return to_hex(buf, 64);
}

std::string gt_hex(const GT& e) {
  std::uint8_t buf[384];
  gt_to_bytes(e, buf);
  return to_hex(buf, 384);
}

std::string fr_hex(const Fr& s) {
  std::uint8_t buf[32];
  s.to_bytes(buf);
  return to_hex(buf, 32);
}

// accepts python-style 0x hex of any length, returns 64 lowercase digits
std::string pad_scalar_hex(std::string s) {
  if (s.rfind("0x", 0) == 0) s = s.substr(2);
  for (auto& c : s) c = static_cast<char>(std::tolower(c));
  while (s.size() < 64) s.insert(s.begin(), '0');
  return s;
}

// mpz wrapper bound to one modulus, for checking field ops independently
struct MpField {
  mpz_t mod;
  explicit MpField(const char* mod_hex) { mpz_init_set_str(mod, mod_hex, 0); }
  ~MpField() { mpz_clear(mod); }

  std::array<std::uint8_t, 32> reduce_bytes(const std::uint8_t* in64, size_t len) const {
    mpz_t v;
    mpz_init(v);
    mpz_import(v, len, 1, 1, 1, 0, in64);
    mpz_mod(v, v, mod);
    auto out = export32(v);
    mpz_clear(v);
    return out;
  }

  static std::array<std::uint8_t, 32> export32(const mpz_t v) {
    std::array<std::uint8_t, 32> out{};
    size_t count = 0;
    mpz_export(out.data(), &count, 1, 1, 1, 0, v);
    // right-align (mpz_export writes most significant first without padding)
    if (count < 32) {
      std::array<std::uint8_t, 32> shifted{};
      for (size_t i = 0; i < count; ++i) shifted[32 - count + i] = out[i];
      return shifted;
    }
    return out;
  }
};

template <typename F>
void check_field_against_gmp(const char* mod_hex, std::uint64_t seed) {
  MpField fld(mod_hex);
  std::mt19937_64 gen(seed);
  mpz_t a, b, c;
  mpz_inits(a, b, c, nullptr);

  auto rand_pair = [&](std::array<std::uint8_t, 32>& abytes,
                       std::array<std::uint8_t, 32>& bbytes) {
    std::uint8_t wide[64];
    for (auto& byte : wide) byte = static_cast<std::uint8_t>(gen());
    abytes = fld.reduce_bytes(wide, 32);
    bbytes = fld.reduce_bytes(wide + 32, 32);
  };

  int failures = 0;
  for (int i = 0; i < 10000 && failures == 0; ++i) {
    std::array<std::uint8_t, 32> ab, bb;
    rand_pair(ab, bb);
    const auto fa = F::from_bytes(std::span<const std::uint8_t, 32>(ab));
    const auto fb = F::from_bytes(std::span<const std::uint8_t, 32>(bb));
    REQUIRE(fa.has_value());
    REQUIRE(fb.has_value());
    mpz_import(a, 32, 1, 1, 1, 0, ab.data());
    mpz_import(b, 32, 1, 1, 1, 0, bb.data());

    std::array<std::uint8_t, 32> got;

    mpz_add(c, a, b);
    mpz_mod(c, c, fld.mod);
    (*fa + *fb).to_bytes(got.data());
    if (MpField::export32(c) != got) ++failures;

    mpz_sub(c, a, b);
    mpz_mod(c, c, fld.mod);
    (*fa - *fb).to_bytes(got.data());
    if (MpField::export32(c) != got) ++failures;

    mpz_mul(c, a, b);
    mpz_mod(c, c, fld.mod);
    (*fa * *fb).to_bytes(got.data());
    if (MpField::export32(c) != got) ++failures;

    if (mpz_sgn(a) != 0) {
      REQUIRE(mpz_invert(c, a, fld.mod) != 0);
      fa->inverse().to_bytes(got.data());
      if (MpField::export32(c) != got) ++failures;
    }
  }
  CHECK(failures == 0);
  mpz_clears(a, b, c, nullptr);
}

}  // namespace

TEST_CASE("base field matches gmp on random inputs") {
  check_field_against_gmp<Fp>(
      "0x30644e72e131a029b85045b68181585d97816a916871ca8d3c208c16d87cfd47", 11);
}

TEST_CASE("scalar field matches gmp on random inputs") {
  check_field_against_gmp<Fr>(
      "0x30644e72e131a029b85045b68181585d2833e84879b9709143e1f593f0000001", 12);
}

TEST_CASE("base field square roots round trip") {
  SeededRng rng(77);
  for (int i = 0; i < 200; ++i) {
    std::uint8_t wide[64];
    rng.fill(std::span<std::uint8_t>(wide, 64));
    const Fp x = Fp::from_bytes_wide(std::span<const std::uint8_t, 64>(wide));
    const Fp sq = x.square();
    const auto root = sq.sqrt();
    REQUIRE(root.has_value());
    CHECK(root->square() == sq);
  }
}

TEST_CASE("generators lie on curve and in the right subgroups") {
  CHECK(g1_on_curve(g1_gen()));
  CHECK(g2_on_curve(g2_gen()));
  CHECK(g2_in_subgroup(g2_gen()));
  // order-r check for G1 as well
  const auto& order = FrTag::modulus;
  CHECK(G1::from_affine(g1_gen())
            .mul_limbs(std::span<const u64>(order.data(), 4))
            .is_infinity());
}

TEST_CASE("point encodings match frozen vectors") {
  const auto j = testutil::load_vectors("group_golden.json");
  CHECK(g1_hex(g1_gen()) == j.at("g1_gen").get<std::string>());
  CHECK(g2_hex(g2_gen()) == j.at("g2_gen").get<std::string>());

  const auto k_bytes = from_hex(pad_scalar_hex(j.at("scalar_k").get<std::string>()));
  REQUIRE(k_bytes.size() == 32);
  const auto k = Fr::from_bytes(std::span<const std::uint8_t, 32>(k_bytes.data(), 32));
  REQUIRE(k.has_value());
  CHECK(g1_hex(G1::from_affine(g1_gen()).mul(*k).to_affine()) ==
        j.at("k_g1").get<std::string>());
  CHECK(g2_hex(G2::from_affine(g2_gen()).mul(*k).to_affine()) ==
        j.at("k_g2").get<std::string>());

  // sum of i^2 * g for i = 1..8 through the msm interface
  std::vector<G1Affine> pts(8, g1_gen());
  std::vector<Fr> coeffs;
  for (std::uint64_t i = 1; i <= 8; ++i) coeffs.push_back(Fr::from_u64(i * i));
  CHECK(g1_hex(msm(pts, coeffs).to_affine()) == j.at("msm_8").get<std::string>());
}

TEST_CASE("pairing matches frozen vectors") {
  const auto j = testutil::load_vectors("group_golden.json");
  const GT e = pair(g1_gen(), g2_gen());
  CHECK(gt_hex(e) == j.at("e_g1_g2").get<std::string>());

  const G1Affine p2 = G1::from_affine(g1_gen()).dbl().to_affine();
  const G2Affine q3 =
      G2::from_affine(g2_gen()).mul(Fr::from_u64(3)).to_affine();
  CHECK(gt_hex(pair(p2, q3)) == j.at("e_2g1_3g2").get<std::string>());
}

TEST_CASE("pairing is bilinear and non-degenerate") {
  SeededRng rng(1234);
  const GT base = pair(g1_gen(), g2_gen());
  CHECK(!base.is_one());

  for (int i = 0; i < 8; ++i) {
    const Fr a = rng.nonzero_scalar();
    const Fr b = rng.nonzero_scalar();
    const G1Affine pa = G1::from_affine(g1_gen()).mul(a).to_affine();
    const G2Affine qb = G2::from_affine(g2_gen()).mul(b).to_affine();
    const GT lhs = pair(pa, qb);
    const Fr ab = a * b;
    const auto limbs = ab.to_limbs();
    const GT rhs = base.pow(std::span<const u64>(limbs.data(), 4));
    CHECK(gt_hex(lhs) == gt_hex(rhs));
  }

  // additivity in the first slot
  const Fr a = rng.nonzero_scalar();
  const Fr b = rng.nonzero_scalar();
  const G1Affine pa = G1::from_affine(g1_gen()).mul(a).to_affine();
  const G1Affine pb = G1::from_affine(g1_gen()).mul(b).to_affine();
  const G1Affine pab = G1::from_affine(pa).add(pb).to_affine();
  CHECK(gt_hex(pair(pab, g2_gen())) ==
        gt_hex(pair(pa, g2_gen()) * pair(pb, g2_gen())));
}

TEST_CASE("multi_pair equals product of single pairings") {
  SeededRng rng(555);
  std::vector<G1Affine> ps;
  std::vector<G2Affine> qs;
  GT expect = GT::one();
  for (int i = 0; i < 3; ++i) {
    const G1Affine p = G1::from_affine(g1_gen()).mul(rng.nonzero_scalar()).to_affine();
    const G2Affine q = G2::from_affine(g2_gen()).mul(rng.nonzero_scalar()).to_affine();
    ps.push_back(p);
    qs.push_back(q);
    expect = expect * pair(p, q);
  }
  CHECK(gt_hex(multi_pair(ps, qs)) == gt_hex(expect));

  // pairs with an infinity slot contribute the identity
  ps.push_back(G1Affine::infinity());
  qs.push_back(g2_gen());
  CHECK(gt_hex(multi_pair(ps, qs)) == gt_hex(expect));
}

TEST_CASE("frobenius endomorphisms agree with plain exponentiation") {
  SeededRng rng(99);
  // a generic Fp12 element (not cyclotomic): e(g1,g2) times random tower noise
  Fp12 f = pair(g1_gen(), g2_gen());
  f.c0.c1 = f.c0.c1 + Fp2{Fp::from_u64(rng.u64_value()), Fp::from_u64(rng.u64_value())};
  f.c1.c2 = f.c1.c2 + Fp2{Fp::from_u64(rng.u64_value()), Fp::one()};

  const auto& p = FpTag::modulus;
  const Fp12 by_pow = f.pow(std::span<const u64>(p.data(), 4));
  CHECK(gt_hex(f.frobenius()) == gt_hex(by_pow));
  CHECK(gt_hex(f.frobenius_p2()) == gt_hex(f.frobenius().frobenius()));
  CHECK(gt_hex(f.frobenius_p3()) == gt_hex(f.frobenius_p2().frobenius()));
}

TEST_CASE("scalar multiplication matches a plain double-and-add ladder") {
  SeededRng rng(4242);
  for (int i = 0; i < 10; ++i) {
    const Fr k = rng.scalar();
    const auto limbs = k.to_limbs();
    // naive MSB-first ladder
    G1 acc = G1::infinity();
    for (int limb = 3; limb >= 0; --limb) {
      for (int bit = 63; bit >= 0; --bit) {
        acc = acc.dbl();
        if ((limbs[static_cast<size_t>(limb)] >> bit) & 1)
          acc = acc.add(G1::from_affine(g1_gen()));
      }
    }
    CHECK(g1_hex(acc.to_affine()) ==
          g1_hex(G1::from_affine(g1_gen()).mul(k).to_affine()));
  }
}

TEST_CASE("encodings reject invalid points and round trip valid ones") {
  SeededRng rng(31337);
  for (int i = 0; i < 20; ++i) {
    const G1Affine p = G1::from_affine(g1_gen()).mul(rng.nonzero_scalar()).to_affine();
    std::uint8_t buf[32];
    g1_to_bytes(p, buf);
    const auto back = g1_from_bytes(std::span<const std::uint8_t, 32>(buf, 32));
    REQUIRE(back.has_value());
    CHECK(*back == p);

    const G2Affine q = G2::from_affine(g2_gen()).mul(rng.nonzero_scalar()).to_affine();
    std::uint8_t buf2[64];
    g2_to_bytes(q, buf2);
    const auto back2 = g2_from_bytes(std::span<const std::uint8_t, 64>(buf2, 64));
    REQUIRE(back2.has_value());
    CHECK(*back2 == q);
  }

  // identity round trip
  std::uint8_t zero32[32] = {0};
  std::uint8_t zero64[64] = {0};
  CHECK(g1_from_bytes(std::span<const std::uint8_t, 32>(zero32, 32))->inf);
  CHECK(g2_from_bytes(std::span<const std::uint8_t, 64>(zero64, 64))->inf);

  // x with no curve solution must be rejected
  int rejected = 0;
  for (std::uint64_t t = 0; t < 64; ++t) {
    std::uint8_t buf[32] = {0};
    buf[0] = 0x80;
    buf[31] = static_cast<std::uint8_t>(t);
    if (!g1_from_bytes(std::span<const std::uint8_t, 32>(buf, 32))) ++rejected;
  }
  CHECK(rejected > 0);

  // a twist point outside the order-r subgroup must be rejected
  Fp x = Fp::from_u64(1);
  int checked = 0;
  for (int tries = 0; tries < 200 && checked == 0; ++tries) {
    x = x + Fp::one();
    const Fp2 xx{x, Fp::from_u64(5)};
    const auto y = (xx.square() * xx + g2_b()).sqrt();
    if (!y) continue;
    const G2Affine cand{xx, *y};
    REQUIRE(g2_on_curve(cand));
    if (g2_in_subgroup(cand)) continue;  // astronomically unlikely
    std::uint8_t buf[64];
    g2_to_bytes(cand, buf);
    CHECK(!g2_from_bytes(std::span<const std::uint8_t, 64>(buf, 64)).has_value());
    ++checked;
  }
  CHECK(checked == 1);
}

TEST_CASE("hash to scalar matches frozen vectors and separates tags") {
  const auto j = testutil::load_vectors("group_golden.json");
  const auto& table = j.at("hash_to_scalar");
  for (auto it = table.begin(); it != table.end(); ++it) {
    const std::string& key = it.key();
    const auto bar = key.find('|');
    REQUIRE(bar != std::string::npos);
    const std::string tag = key.substr(0, bar);
    const std::string msg = key.substr(bar + 1);
    const Fr got = hash_to_scalar(
        tag, std::span<const std::uint8_t>(
                 reinterpret_cast<const std::uint8_t*>(msg.data()), msg.size()));
    CHECK(fr_hex(got) == pad_scalar_hex(it.value().get<std::string>()));
  }
  // distinct tags must not collide even when tag||data coincides
  const std::uint8_t ab[] = {'a', 'b'};
  const std::uint8_t b[] = {'b'};
  CHECK(fr_hex(hash_to_scalar("xa", {b, 1})) != fr_hex(hash_to_scalar("x", {ab, 2})));
}

TEST_CASE("hash to g1 produces valid distinct points and matches vectors") {
  const auto j = testutil::load_vectors("group_golden.json");
  const auto& bases = j.at("pedersen_bases");
  for (auto it = bases.begin(); it != bases.end(); ++it) {
    const G1Affine pt = hash_to_g1(it.key(), {});
    CHECK(g1_on_curve(pt));
    CHECK(g1_hex(pt) == it.value().get<std::string>());
  }
  CHECK(g1_hex(hash_to_g1("pisces/base/1", {})) != g1_hex(hash_to_g1("pisces/base/2", {})));
}
