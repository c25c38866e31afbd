// User-side wallet: holds the one registration record plus asset records,
// builds transaction requests with fresh nonces, and finalizes platform
// blind responses into verified records.
//
// A wallet is single-owner; callers serialize concurrent use. Build methods
// validate inputs and throw WalletError with a machine-readable code; the
// request they return is immutable and can be sent any number of times (the
// platform accepts it once). Finalize methods verify every unblinded
// signature before mutating the wallet, so a failed finalize leaves the
// wallet unchanged — though the platform has already burned the spent
// nonces, which the distinct `desync` error surfaces.
#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pisces/protocol/requests.hpp"
#include "pisces/records/records.hpp"

namespace pisces::protocol {

enum class WalletErrc {
  not_registered,
  already_registered,
  unknown_asset,          // no holding of the named asset
  insufficient_balance,   // no single record covers the amount
  bad_amount,             // zero or out-of-range amount
  inexact_exchange,       // fairness equation has no integer solution
  amount_too_large,       // exact, but the bought amount overflows 32 bits
  stale_price,            // price credential from another epoch or invalid
  bad_response,           // malformed platform response
  desync,                 // platform signature invalid; nonces already burned
};
std::string_view wallet_errc_string(WalletErrc c);

class WalletError : public std::runtime_error {
 public:
  WalletError(WalletErrc code, const std::string& what, std::uint32_t suggested = 0)
      : std::runtime_error(what), code_(code), suggested_(suggested) {}

  WalletErrc code() const { return code_; }
  // for inexact_exchange: the largest amount <= the requested one that
  // exchanges exactly (0 when none exists)
  std::uint32_t suggested_amount() const { return suggested_; }

 private:
  WalletErrc code_;
  std::uint32_t suggested_;
};

// Blind-issuance session state between build and finalize: the unsigned
// record contents plus the blinding factors needed to unblind.
struct PendingJoin {
  Fr t_reg;
  records::RegistrationRecord plain;
};
struct PendingDeposit {
  Fr t_asset;
  records::AssetRecord plain;
};
struct PendingExchange {
  Fr t_reg, t_left, t_new;
  records::RegistrationRecord reg_plain;
  records::AssetRecord left_plain, new_plain;
  Fr spent_aid;
};
struct PendingWithdraw {
  Fr t_reg, t_left;
  records::RegistrationRecord reg_plain;
  records::AssetRecord left_plain;
  Fr spent_aid;
};
struct PendingFile {
  Fr t_reg, t_doc;
  records::RegistrationRecord reg_plain;
  records::ComplianceDoc doc_plain;
};

class UserWallet {
 public:
  explicit UserWallet(const Fr& usk);
  static UserWallet create(Rng& rng) { return UserWallet(rng.nonzero_scalar()); }

  const Fr& usk() const { return usk_; }
  const G1Affine& upk() const { return upk_; }
  bool registered() const { return registration_.has_value(); }
  const std::optional<records::RegistrationRecord>& registration() const {
    return registration_;
  }
  const std::vector<records::AssetRecord>& assets() const { return assets_; }
  // total unspent units of one asset across records
  std::uint64_t balance(std::uint32_t name) const;

  std::pair<JoinRequest, PendingJoin> build_join(
      const records::PlatformKeys& keys, std::uint32_t epoch, Rng& rng);
  std::pair<DepositRequest, PendingDeposit> build_deposit(
      const records::PlatformKeys& keys, std::uint32_t epoch, std::uint32_t name,
      std::uint32_t amt, std::uint32_t price, Rng& rng);
  // spends the single largest record of `from`; price credentials must carry
  // the current epoch
  std::pair<ExchangeRequest, PendingExchange> build_exchange(
      const records::PlatformKeys& keys, std::uint32_t epoch, std::uint32_t from,
      std::uint32_t amt, std::uint32_t to,
      const records::PriceCredential& price_from,
      const records::PriceCredential& price_to, Rng& rng);
  std::pair<WithdrawRequest, PendingWithdraw> build_withdraw(
      const records::PlatformKeys& keys, std::uint32_t epoch, std::uint32_t name,
      std::uint32_t amt, const std::string& address,
      const records::PriceCredential& price_cred, Rng& rng);
  std::pair<FileRequest, PendingFile> build_file(const records::PlatformKeys& keys,
                                                 std::uint32_t epoch,
                                                 std::uint32_t au, Rng& rng);

  // Each verifies the unblinded signatures, then atomically retires the
  // spent records and installs the new ones. Throws WalletError(desync) and
  // leaves the wallet unchanged when a signature does not verify.
  void finalize_join(const records::PlatformKeys& keys, const PendingJoin& p,
                     const Response& r);
  void finalize_deposit(const records::PlatformKeys& keys, const PendingDeposit& p,
                        const Response& r);
  void finalize_exchange(const records::PlatformKeys& keys,
                         const PendingExchange& p, const Response& r);
  void finalize_withdraw(const records::PlatformKeys& keys,
                         const PendingWithdraw& p, const Response& r);
  // returns the certified compliance document
  records::ComplianceDoc finalize_file(const records::PlatformKeys& keys,
                                       const PendingFile& p, const Response& r);

  // Plaintext persistence: "pisces-wallet/v1" header, then one
  // "<tag> <hex payload> <crc32>" line per field (usk, registration, assets).
  std::vector<std::uint8_t> serialize() const;
  static std::optional<UserWallet> deserialize(std::span<const std::uint8_t> in);

 private:
  Fr fresh_nonce(Rng& rng);
  const records::RegistrationRecord& need_registration() const;
  std::size_t pick_record(std::uint32_t name, std::uint32_t amt) const;

  Fr usk_;
  G1Affine upk_;
  std::optional<records::RegistrationRecord> registration_;
  std::vector<records::AssetRecord> assets_;
  // every nonce this wallet ever placed in a built request
  std::set<std::array<std::uint8_t, 32>> issued_nonces_;
};

}  // namespace pisces::protocol
