// Platform side of the exchange: proof verification and blind issuance for
// the five transactions, price-credential publication, spent-nonce and
// registered-user bookkeeping, settlement and flow ledgers, the authority's
// document check, and the liquidity self-audit.
//
// Handlers are strictly transactional: every check runs before the first
// state mutation, and the spent-nonce log is persisted before the blind
// response leaves the handler, so a crash between the two cannot enable a
// double spend. A rejected request leaves the state byte-identical.
//
// The platform object itself is single-writer: callers (the daemon, the
// scenario engine) serialize access; verification is pure given a snapshot.
#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "pisces/protocol/requests.hpp"
#include "pisces/records/records.hpp"

namespace pisces::platform {

using group::Fr;
using group::G1Affine;
using protocol::Error;
using protocol::Response;

struct PlatformConfig {
  std::uint32_t n_assets = 0;             // 1..65536; asset 1 is fiat
  std::vector<std::uint32_t> prices;      // initial price per asset, each >= 1
  std::vector<std::uint64_t> floats;      // reserve float per asset (or empty)
  std::uint32_t regulatory_epoch = 0;     // au certified into compliance docs
};

struct FlowEntry {
  std::uint64_t ts = 0;
  std::uint32_t name = 0;
  bool outgoing = false;
  std::uint32_t amt = 0;
};

struct SettlementEntry {
  std::uint32_t id = 0;
  bool outgoing = false;
  std::uint32_t name = 0;
  std::uint32_t amt = 0;
  std::uint64_t ts = 0;
  std::string address;
  bool consumed = false;  // incoming entries only: claimed by a deposit
};

struct PriceFeedUpdate {
  std::uint32_t epoch = 0;
  std::vector<std::uint32_t> prices;                  // by asset index, 1-based
  std::vector<records::PriceCredential> credentials;  // one per asset
};

struct CheckReport {
  struct Coin {
    std::uint32_t name = 0;
    std::int64_t reserve = 0;          // float + all deposits - all withdrawals
    std::uint64_t window_outflow = 0;  // withdrawals inside the trailing window
    bool pass = false;
  };
  bool pass = true;
  std::uint64_t window = 0;
  std::vector<Coin> coins;
};

class Platform {
 public:
  // Fresh setup. With a non-empty state_dir the platform persists its state
  // there and refuses a directory that is already initialized.
  Platform(const PlatformConfig& cfg, std::uint64_t seed,
           std::string state_dir = {});
  // Reload persisted state; throws std::runtime_error on missing or corrupt
  // files (a damaged state directory must never silently serve).
  static Platform resume(std::string state_dir, std::uint64_t seed);

  Platform(Platform&&) = default;
  Platform& operator=(Platform&&) = default;

  const records::PlatformKeys& keys() const { return pub_keys_; }
  std::uint32_t n_assets() const { return static_cast<std::uint32_t>(prices_.size()); }
  std::uint32_t epoch() const { return epoch_; }
  std::uint32_t regulatory_epoch() const { return regulatory_epoch_; }
  std::uint32_t price(std::uint32_t name) const;
  const std::vector<records::PriceCredential>& credentials() const {
    return credentials_;
  }
  PriceFeedUpdate price_feed() const;
  // Re-signs every asset's credential at the next epoch. Throws
  // std::invalid_argument on a partial or zero-valued price list.
  PriceFeedUpdate publish_prices(const std::vector<std::uint32_t>& prices);

  // simulated clock (seconds) driving flow timestamps and the self-audit
  std::uint64_t now() const { return now_; }
  void advance_time(std::uint64_t seconds);

  // The simulated chain pays the platform; a later deposit request must
  // reference a matching unconsumed entry. Returns the entry id.
  std::uint32_t settle_incoming(std::uint32_t name, std::uint32_t amt);
  const std::vector<SettlementEntry>& settlement_log() const { return settlement_; }
  const std::vector<FlowEntry>& flow_ledger() const { return flow_; }

  // Byte-level entry point: decodes (recording every observed field in the
  // view log) and dispatches on the type tag.
  Response handle(std::span<const std::uint8_t> request);
  Response handle_join(const protocol::JoinRequest& req);
  Response handle_deposit(const protocol::DepositRequest& req);
  Response handle_exchange(const protocol::ExchangeRequest& req);
  Response handle_withdraw(const protocol::WithdrawRequest& req);
  Response handle_file(const protocol::FileRequest& req);

  // Liquidity self-audit: per coin, current reserve must cover the
  // withdrawals of the trailing window.
  CheckReport check(std::uint64_t window_seconds = 30ull * 86400) const;

  bool nonce_spent(const Fr& nonce) const;
  bool user_registered(const G1Affine& upk) const;
  // canonical bytes of all mutable state, for unchanged-on-reject tests
  std::vector<std::uint8_t> snapshot() const;
  const std::vector<protocol::FieldView>& view_log() const { return view_log_; }

 private:
  using Bytes32 = std::array<std::uint8_t, 32>;

  void validate_config(const PlatformConfig& cfg) const;
  void sign_credentials();
  void write_keys();
  void write_meta();
  void append_log(std::ofstream& out, std::span<const std::uint8_t> payload);
  sign::PSSignature blind(const sign::PSKeyPair& kp, const G1Affine& commitment);
  bool fresh(const Fr& nonce) const;
  void spend(const Fr& nonce);

  sign::PSKeyPair price_kp_, registration_kp_, doc_kp_, asset_kp_;
  records::PlatformKeys pub_keys_;
  group::SeededRng rng_;

  std::uint32_t regulatory_epoch_ = 0;
  std::uint32_t epoch_ = 0;
  std::uint64_t now_ = 0;
  std::uint32_t next_settlement_id_ = 1;
  std::vector<std::uint32_t> prices_;  // index 0 holds asset 1
  std::vector<std::uint64_t> floats_;
  std::vector<records::PriceCredential> credentials_;
  std::set<Bytes32> spent_;
  std::set<Bytes32> uset_;
  std::vector<FlowEntry> flow_;
  std::vector<SettlementEntry> settlement_;
  std::vector<protocol::FieldView> view_log_;

  std::string state_dir_;
  std::ofstream nonce_log_, uset_log_, flow_log_, settle_log_;

  Platform() : rng_(0) {}  // for resume()
};

// True iff the document reports the expected regulatory epoch and its
// signature verifies under the platform's document key.
bool authority_verify(const records::PlatformKeys& keys,
                      const records::ComplianceDoc& doc,
                      std::uint32_t expected_au);

}  // namespace pisces::platform
