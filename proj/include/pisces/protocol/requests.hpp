// Wire requests and canonical proof statements for the five exchange
// transactions (join, deposit, exchange, withdraw, file).
//
// A request carries its revealed fields, a fixed-order section of
// prover-chosen group elements (commitment points, randomized signatures,
// range-bit and product-chain commitments), and the proof bytes. The
// verifier reconstructs the single canonical statement for the transaction
// type from the revealed fields plus that section, so the clause structure
// is never negotiable: the Fiat-Shamir challenge hashes the statement bytes,
// and a prover that deviates from the canonical layout cannot match it.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pisces/group/curve.hpp"
#include "pisces/group/rng.hpp"
#include "pisces/records/records.hpp"
#include "pisces/sign/ps.hpp"
#include "pisces/zk/zk.hpp"

namespace pisces::protocol {

using group::Fr;
using group::G1Affine;
using group::Rng;

// transaction type tags (request wire and Fiat-Shamir context)
inline constexpr std::uint8_t kTagJoin = 1;
inline constexpr std::uint8_t kTagDeposit = 2;
inline constexpr std::uint8_t kTagExchange = 3;
inline constexpr std::uint8_t kTagWithdraw = 4;
inline constexpr std::uint8_t kTagFile = 5;

// Asset index 1 is the fiat currency. Depositing or withdrawing it moves
// ordinary money, so the compliance counters skip it: cost and gain
// accumulate only when crypto assets (index >= 2) are sold or withdrawn.
inline constexpr std::uint32_t kFiatIndex = 1;

// Fiat-Shamir context bytes: domain tag, transaction type, price epoch.
std::vector<std::uint8_t> tx_context(std::uint8_t type, std::uint32_t epoch);

// Platform-side record of every request field a handler decoded, for the
// test asserting the platform sees nothing beyond the declared public data.
struct FieldView {
  std::vector<std::pair<std::string, std::size_t>> fields;  // name, byte size
  void note(std::string_view name, std::size_t len) {
    fields.emplace_back(std::string(name), len);
  }
};

// --------------------------------------------------------------------------
// Revealed fields per transaction

struct JoinPublic {
  std::uint32_t epoch = 0;
  G1Affine upk;
};

struct DepositPublic {
  std::uint32_t epoch = 0;
  std::uint32_t name = 0;
  std::uint32_t amt = 0;    // deposited units, < 2^32
  std::uint32_t price = 0;  // claimed current price, checked by the platform
};

struct ExchangePublic {
  std::uint32_t epoch = 0;
  Fr rid;  // spent registration nonce
  Fr aid;  // spent asset nonce
};

struct WithdrawPublic {
  std::uint32_t epoch = 0;
  std::uint32_t name = 0;
  std::uint32_t amt = 0;  // withdrawn units
  Fr rid;
  Fr aid;
  std::string address;  // settlement destination, at most 255 bytes
};

struct FilePublic {
  std::uint32_t epoch = 0;
  std::uint32_t au = 0;  // regulatory epoch the document reports
  G1Affine upk;          // filing user, in the clear
  Fr rid;                // spent registration nonce
};

// --------------------------------------------------------------------------
// Requests
//
// Wire layout: [type: 1][epoch: u32 BE][revealed fields, fixed order]
// [points length: u32 BE][points][proof length: u32 BE][proof].
// `points` is the prover-chosen elements section consumed by the canonical
// statement builders below; `proof` is zk::Proof bytes.

struct JoinRequest {
  JoinPublic pub;
  std::vector<std::uint8_t> points;
  std::vector<std::uint8_t> proof;

  std::vector<std::uint8_t> serialize() const;
  static std::optional<JoinRequest> deserialize(std::span<const std::uint8_t> in,
                                                FieldView* view = nullptr);
};

struct DepositRequest {
  DepositPublic pub;
  std::vector<std::uint8_t> points;
  std::vector<std::uint8_t> proof;

  std::vector<std::uint8_t> serialize() const;
  static std::optional<DepositRequest> deserialize(
      std::span<const std::uint8_t> in, FieldView* view = nullptr);
};

struct ExchangeRequest {
  ExchangePublic pub;
  std::vector<std::uint8_t> points;
  std::vector<std::uint8_t> proof;

  std::vector<std::uint8_t> serialize() const;
  static std::optional<ExchangeRequest> deserialize(
      std::span<const std::uint8_t> in, FieldView* view = nullptr);
};

struct WithdrawRequest {
  WithdrawPublic pub;
  std::vector<std::uint8_t> points;
  std::vector<std::uint8_t> proof;

  std::vector<std::uint8_t> serialize() const;
  static std::optional<WithdrawRequest> deserialize(
      std::span<const std::uint8_t> in, FieldView* view = nullptr);
};

struct FileRequest {
  FilePublic pub;
  std::vector<std::uint8_t> points;
  std::vector<std::uint8_t> proof;

  std::vector<std::uint8_t> serialize() const;
  static std::optional<FileRequest> deserialize(std::span<const std::uint8_t> in,
                                                FieldView* view = nullptr);
};

// type tag of a serialized request, or nullopt when empty
std::optional<std::uint8_t> request_type(std::span<const std::uint8_t> in);

// --------------------------------------------------------------------------
// Canonical statements
//
// PointCursor walks the points section in declaration order: commitment
// points first (skipping commitments derived from revealed fields, like the
// upk point), then per clause in clause order — a randomized signature for
// every SigPoK, `bits` bit commitments for every Range, and the two chain
// commitments for every Product.

class PointCursor {
 public:
  explicit PointCursor(std::span<const std::uint8_t> in) : in_(in) {}

  std::optional<G1Affine> point();
  std::optional<sign::PSSignature> sig();
  bool done() const { return off_ == in_.size(); }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t off_ = 0;
};

// Each returns the one statement the proof must satisfy, or nullopt when the
// points section has the wrong length or an undecodable element.
// withdraw_statement additionally takes the platform's current price for the
// withdrawn asset: it fixes the public gain-accrual constant.
std::optional<zk::Statement> join_statement(const records::PlatformKeys& keys,
                                            const JoinPublic& pub,
                                            PointCursor& cur);
std::optional<zk::Statement> deposit_statement(const records::PlatformKeys& keys,
                                               const DepositPublic& pub,
                                               PointCursor& cur);
std::optional<zk::Statement> exchange_statement(const records::PlatformKeys& keys,
                                                const ExchangePublic& pub,
                                                PointCursor& cur);
std::optional<zk::Statement> withdraw_statement(const records::PlatformKeys& keys,
                                                const WithdrawPublic& pub,
                                                std::uint32_t current_price,
                                                PointCursor& cur);
std::optional<zk::Statement> file_statement(const records::PlatformKeys& keys,
                                            const FilePublic& pub,
                                            PointCursor& cur);

// Commitment indices of the blind-issuance commitments the platform signs,
// in blind-response signature order.
inline constexpr std::size_t kJoinBlindReg = 1;
inline constexpr std::size_t kDepositBlindAsset = 1;
inline constexpr std::size_t kExchangeBlindReg = 2;
inline constexpr std::size_t kExchangeBlindLeft = 3;
inline constexpr std::size_t kExchangeBlindNew = 4;
inline constexpr std::size_t kWithdrawBlindReg = 2;
inline constexpr std::size_t kWithdrawBlindLeft = 3;
inline constexpr std::size_t kFileBlindReg = 2;
inline constexpr std::size_t kFileBlindDoc = 3;

// --------------------------------------------------------------------------
// User-side request constructors
//
// Each builds the canonical witness statement, proves it, and assembles the
// request. They throw std::invalid_argument when the inputs cannot satisfy
// the statement (the prover refuses rather than emit an invalid proof); the
// caller is responsible for friendlier pre-validation.

JoinRequest build_join(const records::PlatformKeys& keys, std::uint32_t epoch,
                       const Fr& usk, const Fr& rid, const Fr& t_reg, Rng& rng);

DepositRequest build_deposit(const records::PlatformKeys& keys,
                             const DepositPublic& pub,
                             const records::RegistrationRecord& reg,
                             const Fr& aid, const Fr& t_asset, Rng& rng);

struct ExchangeSecrets {
  records::RegistrationRecord reg;
  records::AssetRecord asset;  // the spent record (asset i)
  records::PriceCredential price_i;
  records::PriceCredential price_j;
  std::uint32_t k_i = 0;  // units of i sold
  std::uint32_t k_j = 0;  // units of j bought; price_i.pr * k_i = price_j.pr * k_j
  Fr rid_new, aid_left, aid_new;  // fresh nonces for the reissued records
  Fr t_reg, t_left, t_new;        // blind-issuance randomness
};
ExchangeRequest build_exchange(const records::PlatformKeys& keys,
                               std::uint32_t epoch, const ExchangeSecrets& s,
                               Rng& rng);

struct WithdrawSecrets {
  records::RegistrationRecord reg;
  records::AssetRecord asset;
  std::uint32_t k = 0;              // withdrawn units (public)
  std::uint32_t current_price = 0;  // the platform's price this epoch
  std::string address;
  Fr rid_new, aid_left;
  Fr t_reg, t_left;
};
WithdrawRequest build_withdraw(const records::PlatformKeys& keys,
                               std::uint32_t epoch, const WithdrawSecrets& s,
                               Rng& rng);

struct FileSecrets {
  records::RegistrationRecord reg;
  std::uint32_t au = 0;
  Fr rid_new;         // nonce of the reset registration
  Fr t_reg, t_doc;    // blind-issuance randomness
};
FileRequest build_file(const records::PlatformKeys& keys, std::uint32_t epoch,
                       const FileSecrets& s, Rng& rng);

// --------------------------------------------------------------------------
// Responses

enum class Error : std::uint8_t {
  ok = 0,
  invalid_request = 1,  // undecodable bytes
  invalid_proof = 2,
  double_spend = 3,
  stale_epoch = 4,
  already_registered = 5,
  settlement_mismatch = 6,
  stale_au = 7,
  unregistered = 8,
};
std::string_view error_string(Error e);

// Wire: [error: 1]; on success [count: 1][64-byte signatures], otherwise
// [message length: u16 BE][message].
struct Response {
  Error error = Error::ok;
  std::vector<sign::PSSignature> sigs;  // blind signatures, in request order
  std::string message;

  std::vector<std::uint8_t> serialize() const;
  static std::optional<Response> deserialize(std::span<const std::uint8_t> in);
};

}  // namespace pisces::protocol
