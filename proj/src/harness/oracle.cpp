#include "pisces/harness/oracle.hpp"

#include <numeric>

namespace pisces::harness {

namespace {

// mirrors the wallet's divisibility rule for an exchange of amt units
bool exact_exchange(std::uint64_t amt, std::uint64_t price_from,
                    std::uint64_t price_to, std::uint64_t& k_j) {
  const std::uint64_t total = amt * price_from;
  if (total % price_to != 0) return false;
  k_j = total / price_to;
  return true;
}

}  // namespace

bool PlainLedger::joined(int user) const {
  auto it = users_.find(user);
  return it != users_.end() && it->second.joined;
}

const PlainLedger::Record* PlainLedger::largest(int user,
                                                std::uint32_t name) const {
  auto it = users_.find(user);
  if (it == users_.end()) return nullptr;
  const Record* best = nullptr;
  for (const Record& r : it->second.records)
    if (r.name == name && (!best || r.amt > best->amt)) best = &r;
  return best;
}

std::string PlainLedger::refuse_join(int user) const {
  return joined(user) ? "already registered" : "";
}

std::string PlainLedger::refuse_deposit(int user, std::uint64_t amt) const {
  if (!joined(user)) return "not registered";
  if (amt == 0) return "bad amount";
  return "";
}

std::string PlainLedger::refuse_exchange(int user, std::uint32_t from,
                                         std::uint64_t amt, std::uint32_t to,
                                         std::uint64_t price_from,
                                         std::uint64_t price_to) const {
  if (!joined(user)) return "not registered";
  if (amt == 0) return "bad amount";
  const Record* rec = largest(user, from);
  if (!rec) return "unknown asset";
  if (rec->amt < amt) return "insufficient balance";
  std::uint64_t k_j = 0;
  if (!exact_exchange(amt, price_from, price_to, k_j))
    return "inexact exchange";
  if (k_j >> 32) return "amount too large";
  (void)to;
  return "";
}

std::string PlainLedger::refuse_withdraw(int user, std::uint32_t name,
                                         std::uint64_t amt) const {
  if (!joined(user)) return "not registered";
  if (amt == 0) return "bad amount";
  const Record* rec = largest(user, name);
  if (!rec) return "unknown asset";
  if (rec->amt < amt) return "insufficient balance";
  return "";
}

std::string PlainLedger::refuse_file(int user) const {
  return joined(user) ? "" : "not registered";
}

void PlainLedger::join(int user) { users_[user].joined = true; }

void PlainLedger::deposit(int user, std::uint32_t name, std::uint64_t amt,
                          std::uint64_t price) {
  users_[user].records.push_back({name, amt, price});
}

PlainLedger::ExchangePlan PlainLedger::apply_exchange(
    int user, std::uint32_t from, std::uint64_t amt, std::uint32_t to,
    std::uint64_t price_from, std::uint64_t price_to) {
  User& u = users_[user];
  std::size_t best = u.records.size();
  for (std::size_t i = 0; i < u.records.size(); ++i)
    if (u.records[i].name == from &&
        (best == u.records.size() || u.records[i].amt > u.records[best].amt))
      best = i;
  Record spent = u.records[best];
  std::uint64_t k_j = 0;
  exact_exchange(amt, price_from, price_to, k_j);
  u.records.erase(u.records.begin() + static_cast<std::ptrdiff_t>(best));
  u.records.push_back({from, spent.amt - amt, spent.buy_price});
  u.records.push_back({to, k_j, price_to});
  if (from != kFiatAsset) {
    u.cp1 += amt * spent.buy_price;
    u.cp2 += amt * price_from;
  }
  return {amt, k_j, spent.buy_price};
}

std::uint64_t PlainLedger::apply_withdraw(int user, std::uint32_t name,
                                          std::uint64_t amt,
                                          std::uint64_t price_now) {
  User& u = users_[user];
  std::size_t best = u.records.size();
  for (std::size_t i = 0; i < u.records.size(); ++i)
    if (u.records[i].name == name &&
        (best == u.records.size() || u.records[i].amt > u.records[best].amt))
      best = i;
  Record spent = u.records[best];
  u.records.erase(u.records.begin() + static_cast<std::ptrdiff_t>(best));
  u.records.push_back({name, spent.amt - amt, spent.buy_price});
  if (name != kFiatAsset) {
    u.cp1 += amt * spent.buy_price;
    u.cp2 += amt * price_now;
  }
  return spent.buy_price;
}

std::pair<std::uint64_t, std::uint64_t> PlainLedger::file(int user) {
  User& u = users_[user];
  auto out = std::make_pair(u.cp1, u.cp2);
  u.cp1 = 0;
  u.cp2 = 0;
  return out;
}

std::uint64_t PlainLedger::balance(int user, std::uint32_t name) const {
  auto it = users_.find(user);
  if (it == users_.end()) return 0;
  std::uint64_t sum = 0;
  for (const Record& r : it->second.records)
    if (r.name == name) sum += r.amt;
  return sum;
}

std::pair<std::uint64_t, std::uint64_t> PlainLedger::counters(int user) const {
  auto it = users_.find(user);
  if (it == users_.end()) return {0, 0};
  return {it->second.cp1, it->second.cp2};
}

// ---- pure event-trace oracles --------------------------------------------

std::pair<std::uint64_t, std::uint64_t> oracle_compliance(
    std::span<const PlainEvent> events, int user) {
  std::uint64_t cp1 = 0, cp2 = 0;
  for (const PlainEvent& e : events) {
    if (e.user != user) continue;
    switch (e.kind) {
      case PlainEvent::Kind::exchange:
        if (e.name != kFiatAsset) {
          cp1 += e.amt * e.buy_price;
          cp2 += e.amt * e.cur_price;
        }
        break;
      case PlainEvent::Kind::withdraw:
        if (e.name != kFiatAsset) {
          cp1 += e.amt * e.buy_price;
          cp2 += e.amt * e.cur_price;
        }
        break;
      case PlainEvent::Kind::file:
        cp1 = 0;
        cp2 = 0;
        break;
      default:
        break;
    }
  }
  return {cp1, cp2};
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> oracle_filings(
    std::span<const PlainEvent> events, int user) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
  std::uint64_t cp1 = 0, cp2 = 0;
  for (const PlainEvent& e : events) {
    if (e.user != user) continue;
    switch (e.kind) {
      case PlainEvent::Kind::exchange:
      case PlainEvent::Kind::withdraw:
        if (e.name != kFiatAsset) {
          cp1 += e.amt * e.buy_price;
          cp2 += e.amt * e.cur_price;
        }
        break;
      case PlainEvent::Kind::file:
        out.emplace_back(cp1, cp2);
        cp1 = 0;
        cp2 = 0;
        break;
      default:
        break;
    }
  }
  return out;
}

std::optional<std::string> oracle_overdraft(
    std::span<const PlainEvent> events) {
  // independent record tracker: (user, name) -> record amounts
  std::map<int, std::vector<PlainLedger::Record>> held;
  std::map<int, bool> joined;
  auto largest = [&](int user, std::uint32_t name) -> std::size_t {
    auto& recs = held[user];
    std::size_t best = recs.size();
    for (std::size_t i = 0; i < recs.size(); ++i)
      if (recs[i].name == name &&
          (best == recs.size() || recs[i].amt > recs[best].amt))
        best = i;
    return best;
  };
  for (const PlainEvent& e : events) {
    switch (e.kind) {
      case PlainEvent::Kind::join:
        if (joined[e.user]) return "user registered twice";
        joined[e.user] = true;
        break;
      case PlainEvent::Kind::deposit:
        if (!joined[e.user]) return "deposit by unregistered user";
        held[e.user].push_back({e.name, e.amt, e.cur_price});
        break;
      case PlainEvent::Kind::exchange: {
        if (!joined[e.user]) return "exchange by unregistered user";
        auto& recs = held[e.user];
        std::size_t i = largest(e.user, e.name);
        if (i == recs.size()) return "exchange spends a record never issued";
        if (recs[i].amt < e.amt) return "exchange spends more than held";
        if (e.amt * e.cur_price != e.out_amt * e.cur_price_to)
          return "exchange legs have unequal value";
        PlainLedger::Record spent = recs[i];
        recs.erase(recs.begin() + static_cast<std::ptrdiff_t>(i));
        recs.push_back({e.name, spent.amt - e.amt, spent.buy_price});
        recs.push_back({e.to, e.out_amt, e.cur_price_to});
        break;
      }
      case PlainEvent::Kind::withdraw: {
        if (!joined[e.user]) return "withdraw by unregistered user";
        auto& recs = held[e.user];
        std::size_t i = largest(e.user, e.name);
        if (i == recs.size()) return "withdraw spends a record never issued";
        if (recs[i].amt < e.amt) return "withdraw exceeds holdings";
        PlainLedger::Record spent = recs[i];
        recs.erase(recs.begin() + static_cast<std::ptrdiff_t>(i));
        recs.push_back({e.name, spent.amt - e.amt, spent.buy_price});
        break;
      }
      case PlainEvent::Kind::file:
        if (!joined[e.user]) return "filing by unregistered user";
        break;
      case PlainEvent::Kind::check:
        break;
    }
  }
  return std::nullopt;
}

std::map<std::pair<int, std::uint32_t>, std::uint64_t> oracle_balances(
    std::span<const PlainEvent> events) {
  std::map<std::pair<int, std::uint32_t>, std::uint64_t> out;
  for (const PlainEvent& e : events) {
    switch (e.kind) {
      case PlainEvent::Kind::deposit:
        out[{e.user, e.name}] += e.amt;
        break;
      case PlainEvent::Kind::exchange:
        out[{e.user, e.name}] -= e.amt;
        out[{e.user, e.to}] += e.out_amt;
        break;
      case PlainEvent::Kind::withdraw:
        out[{e.user, e.name}] -= e.amt;
        break;
      default:
        break;
    }
  }
  return out;
}

std::vector<bool> oracle_checks(std::span<const PlainEvent> events,
                                std::span<const std::uint64_t> floats,
                                std::uint64_t window_seconds) {
  std::vector<bool> verdicts;
  for (std::size_t upto = 0; upto < events.size(); ++upto) {
    if (events[upto].kind != PlainEvent::Kind::check) continue;
    const std::uint64_t now = events[upto].ts;
    const std::uint64_t cutoff = now > window_seconds ? now - window_seconds : 0;
    bool pass = true;
    for (std::uint32_t name = 1; name <= floats.size(); ++name) {
      std::int64_t reserve = static_cast<std::int64_t>(floats[name - 1]);
      std::uint64_t outflow = 0;
      for (std::size_t i = 0; i < upto; ++i) {
        const PlainEvent& e = events[i];
        if (e.name != name) continue;
        if (e.kind == PlainEvent::Kind::deposit) {
          reserve += static_cast<std::int64_t>(e.amt);
        } else if (e.kind == PlainEvent::Kind::withdraw) {
          reserve -= static_cast<std::int64_t>(e.amt);
          if (e.ts >= cutoff) outflow += e.amt;
        }
      }
      pass = pass && reserve >= 0 &&
             static_cast<std::uint64_t>(reserve) >= outflow;
    }
    verdicts.push_back(pass);
  }
  return verdicts;
}

}  // namespace pisces::harness
