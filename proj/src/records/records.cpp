#include "pisces/records/records.hpp"

#include <stdexcept>

#include "pisces/group/fixed_base.hpp"
#include "pisces/group/hash.hpp"

namespace pisces::records {
namespace {

constexpr const char* kUpkTag = "pisces/upk/v1";

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

// Fixed-offset field reader for the fixed-size record layouts.
struct Reader {
  std::span<const std::uint8_t> in;
  std::size_t off = 0;
  bool ok = true;

  bool header(std::uint8_t tag, std::size_t total) {
    ok = in.size() == total && in[0] == tag && in[1] == kRecordVersion;
    off = 2;
    return ok;
  }
  void fr(Fr& out) {
    if (!ok) return;
    auto v = Fr::from_bytes(std::span<const std::uint8_t, 32>(in.data() + off, 32));
    off += 32;
    if (v)
      out = *v;
    else
      ok = false;
  }
  // scalar constrained to [0, 2^32)
  void fr_u32(Fr& out) {
    fr(out);
    if (!ok) return;
    const group::Limbs4 l = out.to_limbs();
    if (l[1] || l[2] || l[3] || (l[0] >> 32)) ok = false;
  }
  void g1(G1Affine& out) {
    if (!ok) return;
    auto p =
        group::g1_from_bytes(std::span<const std::uint8_t, 32>(in.data() + off, 32));
    off += 32;
    if (p)
      out = *p;
    else
      ok = false;
  }
  void sig(PSSignature& out) {
    g1(out.s1);
    g1(out.s2);
  }
};

}  // namespace

G1Affine compute_upk(const Fr& usk) {
  if (usk.is_zero()) throw std::invalid_argument("compute_upk: usk must be nonzero");
  return group::fast_mul(group::g1_gen(), usk).to_affine();
}

Fr upk_to_scalar(const G1Affine& upk) {
  std::uint8_t buf[32];
  group::g1_to_bytes(upk, buf);
  return group::hash_to_scalar(kUpkTag, std::span<const std::uint8_t>(buf, 32));
}

bool RegistrationRecord::verify(const PSPublicKey& pk) const {
  return sign::ps_verify(pk, messages(), sig);
}

std::vector<std::uint8_t> RegistrationRecord::serialize() const {
  std::vector<std::uint8_t> out{kTagRegistration, kRecordVersion};
  put_fr(out, usk);
  put_fr(out, rid);
  put_fr(out, cp1);
  put_fr(out, cp2);
  put_g1(out, sig.s1);
  put_g1(out, sig.s2);
  return out;
}

std::optional<RegistrationRecord> RegistrationRecord::deserialize(
    std::span<const std::uint8_t> in) {
  Reader r{in};
  if (!r.header(kTagRegistration, 2 + 4 * 32 + 64)) return std::nullopt;
  RegistrationRecord rec;
  r.fr(rec.usk);
  r.fr(rec.rid);
  r.fr(rec.cp1);
  r.fr(rec.cp2);
  r.sig(rec.sig);
  if (!r.ok) return std::nullopt;
  return rec;
}

bool AssetRecord::verify(const PSPublicKey& pk) const {
  return sign::ps_verify(pk, messages(), sig);
}

std::vector<std::uint8_t> AssetRecord::serialize() const {
  std::vector<std::uint8_t> out{kTagAsset, kRecordVersion};
  put_fr(out, usk);
  put_fr(out, aid);
  put_fr(out, name);
  put_fr(out, amt);
  put_fr(out, price);
  put_g1(out, sig.s1);
  put_g1(out, sig.s2);
  return out;
}

std::optional<AssetRecord> AssetRecord::deserialize(
    std::span<const std::uint8_t> in) {
  Reader r{in};
  if (!r.header(kTagAsset, 2 + 5 * 32 + 64)) return std::nullopt;
  AssetRecord rec;
  r.fr(rec.usk);
  r.fr(rec.aid);
  r.fr(rec.name);
  r.fr_u32(rec.amt);
  r.fr_u32(rec.price);
  r.sig(rec.sig);
  if (!r.ok) return std::nullopt;
  return rec;
}

bool PriceCredential::verify(const PSPublicKey& pk) const {
  return sign::ps_verify(pk, messages(), sig);
}

std::vector<std::uint8_t> PriceCredential::serialize() const {
  std::vector<std::uint8_t> out{kTagPrice, kRecordVersion};
  put_fr(out, time);
  put_fr(out, name);
  put_fr(out, pr);
  put_g1(out, sig.s1);
  put_g1(out, sig.s2);
  return out;
}

std::optional<PriceCredential> PriceCredential::deserialize(
    std::span<const std::uint8_t> in) {
  Reader r{in};
  if (!r.header(kTagPrice, 2 + 3 * 32 + 64)) return std::nullopt;
  PriceCredential rec;
  r.fr(rec.time);
  r.fr(rec.name);
  r.fr_u32(rec.pr);
  r.sig(rec.sig);
  if (!r.ok) return std::nullopt;
  return rec;
}

bool ComplianceDoc::verify(const PSPublicKey& pk) const {
  return sign::ps_verify(pk, messages(), sig);
}

std::vector<std::uint8_t> ComplianceDoc::serialize() const {
  std::vector<std::uint8_t> out{kTagComplianceDoc, kRecordVersion};
  put_g1(out, upk);
  put_fr(out, cp1);
  put_fr(out, cp2);
  put_fr(out, au);
  put_g1(out, sig.s1);
  put_g1(out, sig.s2);
  return out;
}

std::optional<ComplianceDoc> ComplianceDoc::deserialize(
    std::span<const std::uint8_t> in) {
  Reader r{in};
  if (!r.header(kTagComplianceDoc, 2 + 32 + 3 * 32 + 64)) return std::nullopt;
  ComplianceDoc rec;
  r.g1(rec.upk);
  r.fr(rec.cp1);
  r.fr(rec.cp2);
  r.fr(rec.au);
  r.sig(rec.sig);
  if (!r.ok) return std::nullopt;
  return rec;
}

std::vector<std::uint8_t> PlatformKeys::serialize() const {
  std::vector<std::uint8_t> out;
  for (const PSPublicKey* pk : {&price, &registration, &doc, &asset}) {
    const std::vector<std::uint8_t> blob = pk->serialize();
    out.insert(out.end(), blob.begin(), blob.end());
  }
  return out;
}

std::optional<PlatformKeys> PlatformKeys::deserialize(
    std::span<const std::uint8_t> in) {
  PlatformKeys keys;
  std::size_t off = 0;
  // each key blob is self-describing: byte 1 holds the slot count
  const auto take = [&](PSPublicKey& out, std::size_t slots) {
    if (in.size() - off < 2 || in[off + 1] != slots) return false;
    const std::size_t need = 2 + 32 + 64 + 64 + slots * 96;
    if (in.size() - off < need) return false;
    auto pk = PSPublicKey::deserialize(in.subspan(off, need));
    off += need;
    if (pk) out = *pk;
    return pk.has_value();
  };
  if (!take(keys.price, 3) || !take(keys.registration, 4) ||
      !take(keys.doc, 4) || !take(keys.asset, 5))
    return std::nullopt;
  if (off != in.size()) return std::nullopt;
  return keys;
}

}  // namespace pisces::records
