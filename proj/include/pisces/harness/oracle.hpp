// Plaintext shadow ledger and oracles. Everything here recomputes balances,
// compliance counters, reserve coverage, and overdraft invariants from a
// cleartext event trace using plain integer arithmetic — none of it touches
// the crypto modules, so agreement with the real wallet and platform is
// evidence rather than tautology.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace pisces::harness {

inline constexpr std::uint32_t kFiatAsset = 1;

// One accepted transaction, in the clear, as known to the scenario driver.
struct PlainEvent {
  enum class Kind : std::uint8_t { join, deposit, exchange, withdraw, file, check };
  Kind kind = Kind::join;
  int user = 0;
  std::uint32_t name = 0;         // deposit/withdraw asset; exchange source
  std::uint32_t to = 0;           // exchange target
  std::uint64_t amt = 0;          // deposit amount / exchange k_i / withdraw k
  std::uint64_t out_amt = 0;      // exchange k_j
  std::uint64_t buy_price = 0;    // exchange/withdraw: spent record's buy price
  std::uint64_t cur_price = 0;    // current price of `name`
  std::uint64_t cur_price_to = 0; // exchange: current price of `to`
  std::uint64_t ts = 0;           // platform clock when accepted
};

// Record-level balances per user with the wallet's exact selection and
// replacement rules: spend the first largest record of the asset, append the
// leftover, then append the proceeds. Also keeps the running compliance
// counters (fiat-exempt) so a scenario driver can predict wallet behavior.
class PlainLedger {
 public:
  struct Record {
    std::uint32_t name = 0;
    std::uint64_t amt = 0;
    std::uint64_t buy_price = 0;
  };
  struct ExchangePlan {
    std::uint64_t k_i = 0;
    std::uint64_t k_j = 0;
    std::uint64_t buy_price = 0;  // of the spent record
  };

  bool joined(int user) const;
  // Each refuse_* returns the wallet's error text, or "" when it would
  // accept; apply_* must only be called after an empty refusal.
  std::string refuse_join(int user) const;
  std::string refuse_deposit(int user, std::uint64_t amt) const;
  std::string refuse_exchange(int user, std::uint32_t from, std::uint64_t amt,
                              std::uint32_t to, std::uint64_t price_from,
                              std::uint64_t price_to) const;
  std::string refuse_withdraw(int user, std::uint32_t name,
                              std::uint64_t amt) const;
  std::string refuse_file(int user) const;

  void join(int user);
  void deposit(int user, std::uint32_t name, std::uint64_t amt,
               std::uint64_t price);
  ExchangePlan apply_exchange(int user, std::uint32_t from, std::uint64_t amt,
                              std::uint32_t to, std::uint64_t price_from,
                              std::uint64_t price_to);
  // returns the spent record's buy price
  std::uint64_t apply_withdraw(int user, std::uint32_t name, std::uint64_t amt,
                               std::uint64_t price_now);
  // returns the counters being certified, then resets them
  std::pair<std::uint64_t, std::uint64_t> file(int user);

  std::uint64_t balance(int user, std::uint32_t name) const;
  std::pair<std::uint64_t, std::uint64_t> counters(int user) const;

 private:
  struct User {
    bool joined = false;
    std::vector<Record> records;
    std::uint64_t cp1 = 0, cp2 = 0;
  };
  const Record* largest(int user, std::uint32_t name) const;
  std::map<int, User> users_;
};

// Accumulated (cost, gain) for one user over the whole trace: every
// non-fiat exchange-out and withdraw contributes amt*buy_price to cost and
// amt*current_price to gain; each `file` event resets the counters.
std::pair<std::uint64_t, std::uint64_t> oracle_compliance(
    std::span<const PlainEvent> events, int user);

// The counters certified at each of the user's file events, in order.
std::vector<std::pair<std::uint64_t, std::uint64_t>> oracle_filings(
    std::span<const PlainEvent> events, int user);

// First violated holding invariant over the accepted trace, or nullopt:
// spends only existing records, non-negative leftovers, exchange legs of
// equal value at current prices, withdrawals within holdings.
std::optional<std::string> oracle_overdraft(std::span<const PlainEvent> events);

// Final per-(user, asset) totals implied by the trace.
std::map<std::pair<int, std::uint32_t>, std::uint64_t> oracle_balances(
    std::span<const PlainEvent> events);

// Reserve-coverage verdict at each check event: per coin,
// float + deposits - withdrawals must cover the trailing-window withdrawals.
std::vector<bool> oracle_checks(std::span<const PlainEvent> events,
                                std::span<const std::uint64_t> floats,
                                std::uint64_t window_seconds);

}  // namespace pisces::harness
