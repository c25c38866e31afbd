#include "pisces/harness/scenario.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <stdexcept>

#include <json.hpp>

#include "pisces/platform/platform.hpp"
#include "pisces/protocol/wallet.hpp"

namespace pisces::harness {

namespace {

using nlohmann::json;
using platform::Platform;
using protocol::UserWallet;
using protocol::wallet_errc_string;
using protocol::WalletError;

constexpr std::uint64_t kWindow = 30ull * 86400;

std::uint64_t fr_low(const group::Fr& v) { return v.to_limbs()[0]; }

bool fr_fits_u64(const group::Fr& v) {
  auto l = v.to_limbs();
  return l[1] == 0 && l[2] == 0 && l[3] == 0;
}

}  // namespace

Scenario Scenario::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("scenario: ") + e.what());
  }
  try {
    Scenario s;
    s.seed = j.value("seed", std::uint64_t{1});
    s.n_assets = j.at("assets").get<std::uint32_t>();
    s.prices = j.at("prices").get<std::vector<std::uint32_t>>();
    s.floats = j.value("floats", std::vector<std::uint64_t>{});
    s.regulatory_epoch = j.value("regulatory_epoch", std::uint32_t{2026});
    s.users = j.value("users", 1);
    if (s.users < 1 || s.users > 64)
      throw std::runtime_error("scenario: user count out of range");
    if (s.prices.size() != s.n_assets)
      throw std::runtime_error("scenario: price list does not match assets");
    auto need_user = [&](const json& a) {
      int u = a.at("user").get<int>();
      if (u < 0 || u >= s.users)
        throw std::runtime_error("scenario: user index out of range");
      return u;
    };
    auto need_name = [&](const json& a, const char* key) {
      auto n = a.at(key).get<std::uint32_t>();
      if (n < 1 || n > s.n_assets)
        throw std::runtime_error("scenario: asset index out of range");
      return n;
    };
    for (const json& a : j.at("actions")) {
      Action act;
      const std::string op = a.at("op").get<std::string>();
      if (op == "join") {
        act.op = Action::Op::join;
        act.user = need_user(a);
      } else if (op == "deposit") {
        act.op = Action::Op::deposit;
        act.user = need_user(a);
        act.name = need_name(a, "name");
        act.amt = a.at("amt").get<std::uint32_t>();
      } else if (op == "exchange") {
        act.op = Action::Op::exchange;
        act.user = need_user(a);
        act.name = need_name(a, "from");
        act.to = need_name(a, "to");
        act.amt = a.at("amt").get<std::uint32_t>();
        if (act.name == act.to)
          throw std::runtime_error("scenario: exchange into the same asset");
      } else if (op == "withdraw") {
        act.op = Action::Op::withdraw;
        act.user = need_user(a);
        act.name = need_name(a, "name");
        act.amt = a.at("amt").get<std::uint32_t>();
        act.address = a.value("address", std::string("acct"));
      } else if (op == "file") {
        act.op = Action::Op::file;
        act.user = need_user(a);
      } else if (op == "publish") {
        act.op = Action::Op::publish;
        act.prices = a.at("prices").get<std::vector<std::uint32_t>>();
        if (act.prices.size() != s.n_assets)
          throw std::runtime_error("scenario: publish list does not match assets");
      } else if (op == "advance") {
        act.op = Action::Op::advance;
        act.seconds = a.at("seconds").get<std::uint64_t>();
      } else if (op == "restart") {
        act.op = Action::Op::restart;
      } else if (op == "check") {
        act.op = Action::Op::check;
      } else {
        throw std::runtime_error("scenario: unknown op '" + op + "'");
      }
      s.actions.push_back(std::move(act));
    }
    return s;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("scenario: ") + e.what());
  }
}

std::string Scenario::to_json() const {
  json j;
  j["seed"] = seed;
  j["assets"] = n_assets;
  j["prices"] = prices;
  if (!floats.empty()) j["floats"] = floats;
  j["regulatory_epoch"] = regulatory_epoch;
  j["users"] = users;
  json acts = json::array();
  for (const Action& a : actions) {
    json e;
    switch (a.op) {
      case Action::Op::join:
        e = {{"op", "join"}, {"user", a.user}};
        break;
      case Action::Op::deposit:
        e = {{"op", "deposit"}, {"user", a.user}, {"name", a.name},
             {"amt", a.amt}};
        break;
      case Action::Op::exchange:
        e = {{"op", "exchange"}, {"user", a.user}, {"from", a.name},
             {"amt", a.amt}, {"to", a.to}};
        break;
      case Action::Op::withdraw:
        e = {{"op", "withdraw"}, {"user", a.user}, {"name", a.name},
             {"amt", a.amt}, {"address", a.address}};
        break;
      case Action::Op::file:
        e = {{"op", "file"}, {"user", a.user}};
        break;
      case Action::Op::publish:
        e = {{"op", "publish"}, {"prices", a.prices}};
        break;
      case Action::Op::advance:
        e = {{"op", "advance"}, {"seconds", a.seconds}};
        break;
      case Action::Op::restart:
        e = {{"op", "restart"}};
        break;
      case Action::Op::check:
        e = {{"op", "check"}};
        break;
    }
    acts.push_back(std::move(e));
  }
  j["actions"] = std::move(acts);
  return j.dump(2);
}

std::string ScenarioReport::diff_report() const {
  if (diffs.empty()) return "ok\n";
  std::string out;
  for (const std::string& d : diffs) out += "diff: " + d + "\n";
  return out;
}

ScenarioReport run_scenario(const Scenario& s, const std::string& state_dir) {
  ScenarioReport rep;
  platform::PlatformConfig cfg;
  cfg.n_assets = s.n_assets;
  cfg.prices = s.prices;
  cfg.floats = s.floats;
  cfg.regulatory_epoch = s.regulatory_epoch;
  std::optional<Platform> p;
  p.emplace(cfg, s.seed, state_dir);

  group::SeededRng rng(s.seed ^ 0xdb1f4b5c9a3e671dULL);
  std::vector<UserWallet> wallets;
  wallets.reserve(static_cast<std::size_t>(s.users));
  for (int u = 0; u < s.users; ++u) wallets.push_back(UserWallet::create(rng));

  PlainLedger mirror;
  std::vector<std::uint64_t> price_now(s.prices.begin(), s.prices.end());
  std::uint64_t ts = 0;

  auto note = [&](const std::string& msg) { rep.diffs.push_back(msg); };

  auto transact = [&](const std::vector<std::uint8_t>& req) {
    protocol::Response r = p->handle(req);
    rep.max_transcript =
        std::max(rep.max_transcript, req.size() + r.serialize().size());
    return r;
  };

  // Compares the wallet's verdict on building a request with the plain
  // ledger's prediction; returns true when the action should be submitted.
  auto agree = [&](const std::string& where, const std::string& refusal,
                   bool built, const std::string& threw) {
    if (refusal.empty() && built) return true;
    if (!built && threw == refusal) {
      ++rep.skipped;
      return false;
    }
    note(where + ": wallet said '" + (built ? std::string("ok") : threw) +
         "', oracle said '" + (refusal.empty() ? std::string("ok") : refusal) +
         "'");
    return false;
  };

  for (std::size_t idx = 0; idx < s.actions.size(); ++idx) {
    const Action& a = s.actions[idx];
    const std::string where = "action " + std::to_string(idx);
    switch (a.op) {
      case Action::Op::join: {
        const std::string refusal = mirror.refuse_join(a.user);
        std::optional<std::pair<protocol::JoinRequest, protocol::PendingJoin>>
            built;
        std::string threw;
        try {
          built.emplace(wallets[a.user].build_join(p->keys(), p->epoch(), rng));
        } catch (const WalletError& e) {
          threw = std::string(wallet_errc_string(e.code()));
        }
        if (!agree(where, refusal, built.has_value(), threw)) break;
        auto resp = transact(built->first.serialize());
        if (resp.error != protocol::Error::ok) {
          note(where + ": platform rejected an honest join: " + resp.message);
          break;
        }
        wallets[a.user].finalize_join(p->keys(), built->second, resp);
        mirror.join(a.user);
        PlainEvent e;
        e.kind = PlainEvent::Kind::join;
        e.user = a.user;
        e.ts = ts;
        rep.events.push_back(e);
        ++rep.accepted;
        break;
      }
      case Action::Op::deposit: {
        const std::string refusal = mirror.refuse_deposit(a.user, a.amt);
        if (refusal.empty()) p->settle_incoming(a.name, a.amt);
        std::optional<
            std::pair<protocol::DepositRequest, protocol::PendingDeposit>>
            built;
        std::string threw;
        try {
          built.emplace(wallets[a.user].build_deposit(
              p->keys(), p->epoch(), a.name, a.amt,
              static_cast<std::uint32_t>(price_now[a.name - 1]), rng));
        } catch (const WalletError& e) {
          threw = std::string(wallet_errc_string(e.code()));
        }
        if (!agree(where, refusal, built.has_value(), threw)) break;
        auto resp = transact(built->first.serialize());
        if (resp.error != protocol::Error::ok) {
          note(where + ": platform rejected an honest deposit: " + resp.message);
          break;
        }
        wallets[a.user].finalize_deposit(p->keys(), built->second, resp);
        mirror.deposit(a.user, a.name, a.amt, price_now[a.name - 1]);
        PlainEvent e;
        e.kind = PlainEvent::Kind::deposit;
        e.user = a.user;
        e.name = a.name;
        e.amt = a.amt;
        e.cur_price = price_now[a.name - 1];
        e.ts = ts;
        rep.events.push_back(e);
        ++rep.accepted;
        break;
      }
      case Action::Op::exchange: {
        const std::uint64_t pf = price_now[a.name - 1];
        const std::uint64_t pt = price_now[a.to - 1];
        const std::string refusal =
            mirror.refuse_exchange(a.user, a.name, a.amt, a.to, pf, pt);
        std::optional<
            std::pair<protocol::ExchangeRequest, protocol::PendingExchange>>
            built;
        std::string threw;
        try {
          const auto& creds = p->credentials();
          built.emplace(wallets[a.user].build_exchange(
              p->keys(), p->epoch(), a.name, a.amt, a.to, creds[a.name - 1],
              creds[a.to - 1], rng));
        } catch (const WalletError& e) {
          threw = std::string(wallet_errc_string(e.code()));
        }
        if (!agree(where, refusal, built.has_value(), threw)) break;
        auto resp = transact(built->first.serialize());
        if (resp.error != protocol::Error::ok) {
          note(where + ": platform rejected an honest exchange: " + resp.message);
          break;
        }
        wallets[a.user].finalize_exchange(p->keys(), built->second, resp);
        auto plan = mirror.apply_exchange(a.user, a.name, a.amt, a.to, pf, pt);
        PlainEvent e;
        e.kind = PlainEvent::Kind::exchange;
        e.user = a.user;
        e.name = a.name;
        e.to = a.to;
        e.amt = plan.k_i;
        e.out_amt = plan.k_j;
        e.buy_price = plan.buy_price;
        e.cur_price = pf;
        e.cur_price_to = pt;
        e.ts = ts;
        rep.events.push_back(e);
        ++rep.accepted;
        break;
      }
      case Action::Op::withdraw: {
        const std::string refusal =
            mirror.refuse_withdraw(a.user, a.name, a.amt);
        std::optional<
            std::pair<protocol::WithdrawRequest, protocol::PendingWithdraw>>
            built;
        std::string threw;
        try {
          const auto& creds = p->credentials();
          built.emplace(wallets[a.user].build_withdraw(
              p->keys(), p->epoch(), a.name, a.amt,
              a.address.empty() ? std::string("acct") : a.address,
              creds[a.name - 1], rng));
        } catch (const WalletError& e) {
          threw = std::string(wallet_errc_string(e.code()));
        }
        if (!agree(where, refusal, built.has_value(), threw)) break;
        auto resp = transact(built->first.serialize());
        if (resp.error != protocol::Error::ok) {
          note(where + ": platform rejected an honest withdraw: " + resp.message);
          break;
        }
        wallets[a.user].finalize_withdraw(p->keys(), built->second, resp);
        const std::uint64_t buy =
            mirror.apply_withdraw(a.user, a.name, a.amt, price_now[a.name - 1]);
        PlainEvent e;
        e.kind = PlainEvent::Kind::withdraw;
        e.user = a.user;
        e.name = a.name;
        e.amt = a.amt;
        e.buy_price = buy;
        e.cur_price = price_now[a.name - 1];
        e.ts = ts;
        rep.events.push_back(e);
        ++rep.accepted;
        break;
      }
      case Action::Op::file: {
        const std::string refusal = mirror.refuse_file(a.user);
        std::optional<std::pair<protocol::FileRequest, protocol::PendingFile>>
            built;
        std::string threw;
        try {
          built.emplace(wallets[a.user].build_file(p->keys(), p->epoch(),
                                                   s.regulatory_epoch, rng));
        } catch (const WalletError& e) {
          threw = std::string(wallet_errc_string(e.code()));
        }
        if (!agree(where, refusal, built.has_value(), threw)) break;
        auto resp = transact(built->first.serialize());
        if (resp.error != protocol::Error::ok) {
          note(where + ": platform rejected an honest filing: " + resp.message);
          break;
        }
        records::ComplianceDoc doc =
            wallets[a.user].finalize_file(p->keys(), built->second, resp);
        if (!fr_fits_u64(doc.cp1) || !fr_fits_u64(doc.cp2))
          note(where + ": certified counters exceed 64 bits");
        ScenarioReport::Filing filing;
        filing.user = a.user;
        filing.cp1 = fr_low(doc.cp1);
        filing.cp2 = fr_low(doc.cp2);
        filing.authority_ok =
            platform::authority_verify(p->keys(), doc, s.regulatory_epoch);
        rep.filings.push_back(filing);
        mirror.file(a.user);
        PlainEvent e;
        e.kind = PlainEvent::Kind::file;
        e.user = a.user;
        e.ts = ts;
        rep.events.push_back(e);
        ++rep.accepted;
        break;
      }
      case Action::Op::publish: {
        p->publish_prices(a.prices);
        price_now.assign(a.prices.begin(), a.prices.end());
        break;
      }
      case Action::Op::advance: {
        p->advance_time(a.seconds);
        ts += a.seconds;
        break;
      }
      case Action::Op::restart: {
        if (state_dir.empty()) break;
        auto before = p->snapshot();
        p.reset();
        p = Platform::resume(state_dir, s.seed);
        if (p->snapshot() != before)
          note(where + ": platform state changed across restart");
        break;
      }
      case Action::Op::check: {
        rep.platform_checks.push_back(p->check(kWindow).pass);
        PlainEvent e;
        e.kind = PlainEvent::Kind::check;
        e.ts = ts;
        rep.events.push_back(e);
        break;
      }
    }
  }

  // ---- cross-checks against the pure event-trace oracles -----------------
  if (p->now() != ts) note("clock drift between driver and platform");

  auto plain_balances = oracle_balances(rep.events);
  for (int u = 0; u < s.users; ++u)
    for (std::uint32_t n = 1; n <= s.n_assets; ++n) {
      const std::uint64_t real = wallets[u].balance(n);
      std::uint64_t plain = 0;
      if (auto it = plain_balances.find({u, n}); it != plain_balances.end())
        plain = it->second;
      if (real != plain || real != mirror.balance(u, n))
        note("final balance mismatch: user " + std::to_string(u) + " asset " +
             std::to_string(n) + " wallet " + std::to_string(real) +
             " oracle " + std::to_string(plain) + " mirror " +
             std::to_string(mirror.balance(u, n)));
    }

  for (int u = 0; u < s.users; ++u) {
    auto expected = oracle_filings(rep.events, u);
    std::size_t seen = 0;
    for (const auto& f : rep.filings) {
      if (f.user != u) continue;
      if (seen >= expected.size()) {
        note("filing count mismatch for user " + std::to_string(u));
        break;
      }
      if (!f.authority_ok)
        note("filed document failed authority verification for user " +
             std::to_string(u));
      if (f.cp1 != expected[seen].first || f.cp2 != expected[seen].second)
        note("filing mismatch for user " + std::to_string(u) + ": doc (" +
             std::to_string(f.cp1) + ", " + std::to_string(f.cp2) +
             ") oracle (" + std::to_string(expected[seen].first) + ", " +
             std::to_string(expected[seen].second) + ")");
      ++seen;
    }
    if (seen != expected.size())
      note("filing count mismatch for user " + std::to_string(u));
  }

  std::vector<std::uint64_t> floats = s.floats;
  if (floats.empty()) floats.assign(s.n_assets, 0);
  auto plain_checks = oracle_checks(rep.events, floats, kWindow);
  if (plain_checks.size() != rep.platform_checks.size()) {
    note("check count mismatch");
  } else {
    for (std::size_t i = 0; i < plain_checks.size(); ++i)
      if (plain_checks[i] != rep.platform_checks[i])
        note("check verdict mismatch at check " + std::to_string(i) +
             ": platform " + (rep.platform_checks[i] ? "pass" : "fail") +
             " oracle " + (plain_checks[i] ? "pass" : "fail"));
  }

  if (auto v = oracle_overdraft(rep.events))
    note("overdraft oracle violation: " + *v);

  rep.snapshot = p->snapshot();
  return rep;
}

Scenario random_scenario(std::uint64_t seed) {
  group::SeededRng g(seed ^ 0x5851f42d4c957f2dULL);
  auto pick = [&](std::uint64_t n) { return n ? g.u64_value() % n : 0; };

  static constexpr std::uint32_t kMid[] = {100, 200, 400, 800, 1000, 1600};
  static constexpr std::uint32_t kSmall[] = {20, 25, 50, 100, 200};

  Scenario s;
  s.seed = seed;
  s.n_assets = 3;
  s.prices = {1, kMid[pick(6)], kSmall[pick(5)]};
  s.floats = {0, 20 + pick(200), 20 + pick(200)};
  s.regulatory_epoch = 2026;
  s.users = pick(5) == 0 ? 2 : 1;

  auto join_all = [&] {
    for (int u = 0; u < s.users; ++u) {
      Action a;
      a.op = Action::Op::join;
      a.user = u;
      s.actions.push_back(a);
    }
  };
  join_all();
  for (int u = 0; u < s.users; ++u) {
    Action a;
    a.op = Action::Op::deposit;
    a.user = u;
    a.name = 1;
    a.amt = s.prices[1] * static_cast<std::uint32_t>(2 + pick(5)) +
            s.prices[2] * static_cast<std::uint32_t>(pick(4));
    s.actions.push_back(a);
    if (pick(100) < 30) {
      Action c;
      c.op = Action::Op::deposit;
      c.user = u;
      c.name = 2 + static_cast<std::uint32_t>(pick(2));
      c.amt = 1 + static_cast<std::uint32_t>(pick(30));
      s.actions.push_back(c);
    }
  }

  const std::uint64_t middle = 1 + pick(3);
  for (std::uint64_t i = 0; i < middle; ++i) {
    const std::uint64_t roll = pick(100);
    const int user = static_cast<int>(pick(static_cast<std::uint64_t>(s.users)));
    Action a;
    a.user = user;
    if (roll < 25) {
      // fiat into crypto, always an exact multiple of the target price
      a.op = Action::Op::exchange;
      a.name = 1;
      a.to = 2 + static_cast<std::uint32_t>(pick(2));
      a.amt = s.prices[a.to - 1] * static_cast<std::uint32_t>(1 + pick(3));
    } else if (roll < 34) {
      // crypto back into fiat, always exact
      a.op = Action::Op::exchange;
      a.name = 2 + static_cast<std::uint32_t>(pick(2));
      a.to = 1;
      a.amt = 1 + static_cast<std::uint32_t>(pick(5));
    } else if (roll < 40) {
      // crypto to crypto through the divisibility step
      a.op = Action::Op::exchange;
      a.name = 2 + static_cast<std::uint32_t>(pick(2));
      a.to = a.name == 2 ? 3 : 2;
      const std::uint32_t step =
          s.prices[a.to - 1] /
          std::gcd(s.prices[a.name - 1], s.prices[a.to - 1]);
      a.amt = step * static_cast<std::uint32_t>(1 + pick(2));
    } else if (roll < 60) {
      a.op = Action::Op::withdraw;
      a.name = 1 + static_cast<std::uint32_t>(pick(3));
      a.amt = a.name == 1 ? static_cast<std::uint32_t>(1 + pick(300))
                          : static_cast<std::uint32_t>(1 + pick(10));
      a.address = "acct-" + std::to_string(user);
    } else if (roll < 70) {
      a.op = Action::Op::publish;
      a.prices = {1, kMid[pick(6)], kSmall[pick(5)]};
    } else if (roll < 80) {
      a.op = Action::Op::advance;
      a.seconds = (1 + pick(40)) * 86400;
    } else if (roll < 90) {
      a.op = Action::Op::check;
    } else {
      a.op = Action::Op::file;
    }
    s.actions.push_back(std::move(a));
  }

  for (int u = 0; u < s.users; ++u) {
    Action a;
    a.op = Action::Op::file;
    a.user = u;
    s.actions.push_back(a);
  }
  Action final_check;
  final_check.op = Action::Op::check;
  s.actions.push_back(final_check);
  return s;
}

}  // namespace pisces::harness
