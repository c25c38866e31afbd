// Scenario driver: a JSON-described action script executed twice in
// parallel — for real, through wallets and a platform, and in the clear,
// through the plaintext ledger — with every divergence reported as a diff.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pisces/harness/oracle.hpp"

namespace pisces::harness {

struct Action {
  enum class Op {
    join,      // user
    deposit,   // user, name, amt
    exchange,  // user, name (source), amt, to
    withdraw,  // user, name, amt, address
    file,      // user
    publish,   // prices
    advance,   // seconds
    restart,   // reload the platform from disk (persistent runs only)
    check
  };
  Op op = Op::check;
  int user = 0;
  std::uint32_t name = 0;
  std::uint32_t to = 0;
  std::uint32_t amt = 0;
  std::string address;
  std::vector<std::uint32_t> prices;
  std::uint64_t seconds = 0;
};

struct Scenario {
  std::uint64_t seed = 1;
  std::uint32_t n_assets = 0;
  std::vector<std::uint32_t> prices;
  std::vector<std::uint64_t> floats;
  std::uint32_t regulatory_epoch = 2026;
  int users = 1;
  std::vector<Action> actions;

  // throws std::runtime_error with a "scenario:" prefix on malformed input
  static Scenario from_json(const std::string& text);
  std::string to_json() const;
};

struct ScenarioReport {
  struct Filing {
    int user = 0;
    std::uint64_t cp1 = 0, cp2 = 0;  // from the certified document
    bool authority_ok = false;
  };

  std::vector<PlainEvent> events;
  int accepted = 0;
  int skipped = 0;  // wallet-side refusals (predicted by the plain ledger)
  std::vector<bool> platform_checks;
  std::vector<Filing> filings;
  std::vector<std::uint8_t> snapshot;  // final platform state
  std::size_t max_transcript = 0;      // largest request+response, bytes
  std::vector<std::string> diffs;      // real-vs-oracle divergences

  bool ok() const { return diffs.empty(); }
  std::string diff_report() const;
};

// Runs the scenario and cross-checks against all the plaintext oracles.
// With a non-empty state_dir the platform persists there (enables restart).
ScenarioReport run_scenario(const Scenario& s, const std::string& state_dir = {});

// Deterministic generator for the property suites: small action scripts
// over 3 assets with mostly-feasible amounts, at least one filing, and a
// final check.
Scenario random_scenario(std::uint64_t seed);

}  // namespace pisces::harness
