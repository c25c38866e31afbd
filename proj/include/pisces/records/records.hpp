// The four signed attribute tuples the exchange parties pass around, with
// canonical byte encodings. Every record is a fixed-order scalar tuple under
// a Pointcheval-Sanders signature; the wire layout is
// [type tag: 1 byte][version: 1 byte][fields in declared order][signature].
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pisces/group/curve.hpp"
#include "pisces/sign/ps.hpp"

namespace pisces::records {

using group::Fr;
using group::G1Affine;
using sign::PSPublicKey;
using sign::PSSignature;

inline constexpr std::uint8_t kRecordVersion = 1;
inline constexpr std::uint8_t kTagRegistration = 1;
inline constexpr std::uint8_t kTagAsset = 2;
inline constexpr std::uint8_t kTagPrice = 3;
inline constexpr std::uint8_t kTagComplianceDoc = 4;

// upk = g^usk; throws std::invalid_argument when usk = 0
G1Affine compute_upk(const Fr& usk);

// Scalar image of an owner public key. Compliance documents bind the owner by
// signing this scalar, because PS signatures carry scalar messages only.
Fr upk_to_scalar(const G1Affine& upk);

// The user's long-lived registration: one-time nonce rid plus the running
// accumulated cost (cp1) and gain (cp2), both in integer cents. A fresh
// registration carries cp1 = cp2 = 0.
struct RegistrationRecord {
  Fr usk;
  Fr rid;
  Fr cp1;
  Fr cp2;
  PSSignature sig;

  std::vector<Fr> messages() const { return {usk, rid, cp1, cp2}; }
  bool verify(const PSPublicKey& pk) const;
  std::vector<std::uint8_t> serialize() const;
  static std::optional<RegistrationRecord> deserialize(
      std::span<const std::uint8_t> in);
  bool operator==(const RegistrationRecord&) const = default;
};

// One holding of one asset: amount in atomic units and the buying price per
// atomic unit in integer cents, both below 2^32 (enforced at decode; fresh
// records prove the bound in zero knowledge at issuance).
struct AssetRecord {
  Fr usk;
  Fr aid;
  Fr name;   // asset index embedded as a scalar
  Fr amt;    // atomic units, < 2^32
  Fr price;  // integer cents per atomic unit, < 2^32
  PSSignature sig;

  std::vector<Fr> messages() const { return {usk, aid, name, amt, price}; }
  bool verify(const PSPublicKey& pk) const;
  std::vector<std::uint8_t> serialize() const;
  static std::optional<AssetRecord> deserialize(std::span<const std::uint8_t> in);
  bool operator==(const AssetRecord&) const = default;
};

// The platform's published quote for one asset in one price epoch. Users fold
// these into exchange proofs instead of opening their asset names, which is
// what keeps an exchange constant-cost in the number of listed assets.
struct PriceCredential {
  Fr time;  // price epoch counter
  Fr name;
  Fr pr;  // current price in integer cents, < 2^32
  PSSignature sig;

  std::vector<Fr> messages() const { return {time, name, pr}; }
  bool verify(const PSPublicKey& pk) const;
  std::vector<std::uint8_t> serialize() const;
  static std::optional<PriceCredential> deserialize(
      std::span<const std::uint8_t> in);
  bool operator==(const PriceCredential&) const = default;
};

// What a user files with the authority: their identity in the clear plus the
// platform-certified cost/gain totals for the regulatory epoch au.
struct ComplianceDoc {
  G1Affine upk;
  Fr cp1;
  Fr cp2;
  Fr au;  // regulatory epoch tag (e.g. tax year)
  PSSignature sig;

  std::vector<Fr> messages() const { return {upk_to_scalar(upk), cp1, cp2, au}; }
  bool verify(const PSPublicKey& pk) const;
  std::vector<std::uint8_t> serialize() const;
  static std::optional<ComplianceDoc> deserialize(std::span<const std::uint8_t> in);
  bool operator==(const ComplianceDoc&) const = default;
};

// The platform's verification keys, one per record type: 3 slots for price
// credentials, 4 for registration records, another 4-slot key for compliance
// docs, 5 for asset records. Strictly separate keys rule out cross-type
// signature confusion: a doc holder knows every scalar the doc signs, so a
// shared 4-slot key would let a doc double as a spendable registration.
struct PlatformKeys {
  PSPublicKey price;         // 3 slots
  PSPublicKey registration;  // 4 slots
  PSPublicKey doc;           // 4 slots, compliance documents only
  PSPublicKey asset;         // 5 slots

  std::vector<std::uint8_t> serialize() const;
  static std::optional<PlatformKeys> deserialize(std::span<const std::uint8_t> in);
};

}  // namespace pisces::records
