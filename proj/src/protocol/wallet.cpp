#include "pisces/protocol/wallet.hpp"

#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <numeric>

namespace pisces::protocol {
namespace {

constexpr std::string_view kWalletMagic = "pisces-wallet/v1";

std::uint64_t fr_low_u64(const Fr& v) { return v.to_limbs()[0]; }

std::string to_hex(std::span<const std::uint8_t> in) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(in.size() * 2);
  for (std::uint8_t b : in) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xf]);
  }
  return out;
}

std::optional<std::vector<std::uint8_t>> from_hex(std::string_view in) {
  if (in.size() % 2) return std::nullopt;
  std::vector<std::uint8_t> out(in.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto nib = [](char c) -> int {
      if (c >= '0' && c <= '9') return c - '0';
      if (c >= 'a' && c <= 'f') return c - 'a' + 10;
      return -1;
    };
    const int hi = nib(in[2 * i]), lo = nib(in[2 * i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

std::uint32_t crc_of(std::span<const std::uint8_t> in) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(in.data()),
            static_cast<uInt>(in.size())));
}

void put_line(std::vector<std::uint8_t>& out, std::string_view tag,
              std::span<const std::uint8_t> payload) {
  std::string line(tag);
  line += ' ';
  line += to_hex(payload);
  char crc[16];
  std::snprintf(crc, sizeof crc, " %08x\n", crc_of(payload));
  line += crc;
  out.insert(out.end(), line.begin(), line.end());
}

// cost/gain accrued by selling or withdrawing k units bought at buy_price
// when the current price is sell_price; the fiat asset accrues nothing
std::pair<Fr, Fr> accrue(const Fr& name, std::uint32_t k, const Fr& buy_price,
                         std::uint32_t sell_price) {
  if (name == Fr::from_u64(kFiatIndex)) return {Fr::zero(), Fr::zero()};
  const Fr kF = Fr::from_u64(k);
  return {kF * buy_price, kF * Fr::from_u64(sell_price)};
}

void check_credential(const records::PlatformKeys& keys,
                      const records::PriceCredential& cred, std::uint32_t name,
                      std::uint32_t epoch) {
  if (cred.name != Fr::from_u64(name) || cred.time != Fr::from_u64(epoch) ||
      !cred.verify(keys.price))
    throw WalletError(WalletErrc::stale_price, "stale price");
}

}  // namespace

std::string_view wallet_errc_string(WalletErrc c) {
  switch (c) {
    case WalletErrc::not_registered:
      return "not registered";
    case WalletErrc::already_registered:
      return "already registered";
    case WalletErrc::unknown_asset:
      return "unknown asset";
    case WalletErrc::insufficient_balance:
      return "insufficient balance";
    case WalletErrc::bad_amount:
      return "bad amount";
    case WalletErrc::inexact_exchange:
      return "inexact exchange";
    case WalletErrc::amount_too_large:
      return "amount too large";
    case WalletErrc::stale_price:
      return "stale price";
    case WalletErrc::bad_response:
      return "bad response";
    case WalletErrc::desync:
      return "desync";
  }
  return "unknown";
}

UserWallet::UserWallet(const Fr& usk)
    : usk_(usk), upk_(records::compute_upk(usk)) {}

std::uint64_t UserWallet::balance(std::uint32_t name) const {
  const Fr nameF = Fr::from_u64(name);
  std::uint64_t total = 0;
  for (const auto& a : assets_)
    if (a.name == nameF) total += fr_low_u64(a.amt);
  return total;
}

Fr UserWallet::fresh_nonce(Rng& rng) {
  for (;;) {
    const Fr n = rng.nonzero_scalar();
    std::array<std::uint8_t, 32> bytes;
    n.to_bytes(bytes.data());
    if (issued_nonces_.insert(bytes).second) return n;
  }
}

const records::RegistrationRecord& UserWallet::need_registration() const {
  if (!registration_)
    throw WalletError(WalletErrc::not_registered, "not registered");
  return *registration_;
}

std::size_t UserWallet::pick_record(std::uint32_t name, std::uint32_t amt) const {
  const Fr nameF = Fr::from_u64(name);
  std::size_t best = assets_.size();
  std::uint64_t best_amt = 0;
  for (std::size_t i = 0; i < assets_.size(); ++i) {
    if (assets_[i].name != nameF) continue;
    const std::uint64_t a = fr_low_u64(assets_[i].amt);
    if (best == assets_.size() || a > best_amt) {
      best = i;
      best_amt = a;
    }
  }
  if (best == assets_.size())
    throw WalletError(WalletErrc::unknown_asset, "unknown asset");
  if (best_amt < amt)
    throw WalletError(WalletErrc::insufficient_balance, "insufficient balance");
  return best;
}

std::pair<JoinRequest, PendingJoin> UserWallet::build_join(
    const records::PlatformKeys& keys, std::uint32_t epoch, Rng& rng) {
  if (registration_)
    throw WalletError(WalletErrc::already_registered, "already registered");
  PendingJoin p;
  p.t_reg = rng.scalar();
  p.plain = records::RegistrationRecord{usk_, fresh_nonce(rng), Fr::zero(),
                                        Fr::zero(), {}};
  JoinRequest req =
      protocol::build_join(keys, epoch, usk_, p.plain.rid, p.t_reg, rng);
  return {std::move(req), std::move(p)};
}

std::pair<DepositRequest, PendingDeposit> UserWallet::build_deposit(
    const records::PlatformKeys& keys, std::uint32_t epoch, std::uint32_t name,
    std::uint32_t amt, std::uint32_t price, Rng& rng) {
  const auto& reg = need_registration();
  if (name < 1) throw WalletError(WalletErrc::unknown_asset, "unknown asset");
  PendingDeposit p;
  p.t_asset = rng.scalar();
  p.plain = records::AssetRecord{usk_, fresh_nonce(rng), Fr::from_u64(name),
                                 Fr::from_u64(amt), Fr::from_u64(price), {}};
  DepositPublic pub{epoch, name, amt, price};
  DepositRequest req =
      protocol::build_deposit(keys, pub, reg, p.plain.aid, p.t_asset, rng);
  return {std::move(req), std::move(p)};
}

std::pair<ExchangeRequest, PendingExchange> UserWallet::build_exchange(
    const records::PlatformKeys& keys, std::uint32_t epoch, std::uint32_t from,
    std::uint32_t amt, std::uint32_t to,
    const records::PriceCredential& price_from,
    const records::PriceCredential& price_to, Rng& rng) {
  const auto& reg = need_registration();
  if (amt == 0) throw WalletError(WalletErrc::bad_amount, "bad amount");
  const records::AssetRecord& rec = assets_[pick_record(from, amt)];
  check_credential(keys, price_from, from, epoch);
  check_credential(keys, price_to, to, epoch);

  const std::uint64_t pr_from = fr_low_u64(price_from.pr);
  const std::uint64_t pr_to = fr_low_u64(price_to.pr);
  const std::uint64_t total = static_cast<std::uint64_t>(amt) * pr_from;
  if (total % pr_to != 0) {
    // the largest exact amount is the largest multiple of pr_to/gcd below amt
    const std::uint64_t step = pr_to / std::gcd(pr_from, pr_to);
    const std::uint32_t suggestion =
        static_cast<std::uint32_t>(amt - amt % step);
    throw WalletError(WalletErrc::inexact_exchange, "inexact exchange",
                      suggestion);
  }
  const std::uint64_t k_j = total / pr_to;
  if (k_j >> 32)
    throw WalletError(WalletErrc::amount_too_large, "amount too large");

  ExchangeSecrets s;
  s.reg = reg;
  s.asset = rec;
  s.price_i = price_from;
  s.price_j = price_to;
  s.k_i = amt;
  s.k_j = static_cast<std::uint32_t>(k_j);
  s.rid_new = fresh_nonce(rng);
  s.aid_left = fresh_nonce(rng);
  s.aid_new = fresh_nonce(rng);
  s.t_reg = rng.scalar();
  s.t_left = rng.scalar();
  s.t_new = rng.scalar();

  const auto [d1, d2] =
      accrue(rec.name, amt, rec.price, static_cast<std::uint32_t>(pr_from));
  PendingExchange p;
  p.t_reg = s.t_reg;
  p.t_left = s.t_left;
  p.t_new = s.t_new;
  p.reg_plain = records::RegistrationRecord{usk_, s.rid_new, reg.cp1 + d1,
                                            reg.cp2 + d2, {}};
  p.left_plain = records::AssetRecord{
      usk_, s.aid_left, rec.name, rec.amt - Fr::from_u64(amt), rec.price, {}};
  p.new_plain = records::AssetRecord{usk_, s.aid_new, price_to.name,
                                     Fr::from_u64(k_j), price_to.pr, {}};
  p.spent_aid = rec.aid;

  ExchangeRequest req = protocol::build_exchange(keys, epoch, s, rng);
  return {std::move(req), std::move(p)};
}

std::pair<WithdrawRequest, PendingWithdraw> UserWallet::build_withdraw(
    const records::PlatformKeys& keys, std::uint32_t epoch, std::uint32_t name,
    std::uint32_t amt, const std::string& address,
    const records::PriceCredential& price_cred, Rng& rng) {
  const auto& reg = need_registration();
  if (amt == 0) throw WalletError(WalletErrc::bad_amount, "bad amount");
  if (address.size() > 255)
    throw WalletError(WalletErrc::bad_amount, "address too long");
  const records::AssetRecord& rec = assets_[pick_record(name, amt)];
  check_credential(keys, price_cred, name, epoch);

  WithdrawSecrets s;
  s.reg = reg;
  s.asset = rec;
  s.k = amt;
  s.current_price = static_cast<std::uint32_t>(fr_low_u64(price_cred.pr));
  s.address = address;
  s.rid_new = fresh_nonce(rng);
  s.aid_left = fresh_nonce(rng);
  s.t_reg = rng.scalar();
  s.t_left = rng.scalar();

  const auto [d1, d2] = accrue(rec.name, amt, rec.price, s.current_price);
  PendingWithdraw p;
  p.t_reg = s.t_reg;
  p.t_left = s.t_left;
  p.reg_plain = records::RegistrationRecord{usk_, s.rid_new, reg.cp1 + d1,
                                            reg.cp2 + d2, {}};
  p.left_plain = records::AssetRecord{
      usk_, s.aid_left, rec.name, rec.amt - Fr::from_u64(amt), rec.price, {}};
  p.spent_aid = rec.aid;

  WithdrawRequest req = protocol::build_withdraw(keys, epoch, s, rng);
  return {std::move(req), std::move(p)};
}

std::pair<FileRequest, PendingFile> UserWallet::build_file(
    const records::PlatformKeys& keys, std::uint32_t epoch, std::uint32_t au,
    Rng& rng) {
  const auto& reg = need_registration();
  FileSecrets s;
  s.reg = reg;
  s.au = au;
  s.rid_new = fresh_nonce(rng);
  s.t_reg = rng.scalar();
  s.t_doc = rng.scalar();

  PendingFile p;
  p.t_reg = s.t_reg;
  p.t_doc = s.t_doc;
  p.reg_plain =
      records::RegistrationRecord{usk_, s.rid_new, Fr::zero(), Fr::zero(), {}};
  p.doc_plain = records::ComplianceDoc{upk_, reg.cp1, reg.cp2,
                                       Fr::from_u64(au), {}};

  FileRequest req = protocol::build_file(keys, epoch, s, rng);
  return {std::move(req), std::move(p)};
}

namespace {

const std::vector<sign::PSSignature>& expect_sigs(const Response& r,
                                                  std::size_t count) {
  if (r.error != Error::ok || r.sigs.size() != count)
    throw WalletError(WalletErrc::bad_response, "bad response");
  return r.sigs;
}

}  // namespace

void UserWallet::finalize_join(const records::PlatformKeys& keys,
                               const PendingJoin& p, const Response& r) {
  const auto& sigs = expect_sigs(r, 1);
  records::RegistrationRecord reg = p.plain;
  reg.sig = sign::ps_unblind(sigs[0], p.t_reg);
  if (!reg.verify(keys.registration))
    throw WalletError(WalletErrc::desync, "desync");
  registration_ = std::move(reg);
}

void UserWallet::finalize_deposit(const records::PlatformKeys& keys,
                                  const PendingDeposit& p, const Response& r) {
  const auto& sigs = expect_sigs(r, 1);
  records::AssetRecord rec = p.plain;
  rec.sig = sign::ps_unblind(sigs[0], p.t_asset);
  if (!rec.verify(keys.asset)) throw WalletError(WalletErrc::desync, "desync");
  assets_.push_back(std::move(rec));
}

void UserWallet::finalize_exchange(const records::PlatformKeys& keys,
                                   const PendingExchange& p, const Response& r) {
  const auto& sigs = expect_sigs(r, 3);
  records::RegistrationRecord reg = p.reg_plain;
  records::AssetRecord left = p.left_plain, bought = p.new_plain;
  reg.sig = sign::ps_unblind(sigs[0], p.t_reg);
  left.sig = sign::ps_unblind(sigs[1], p.t_left);
  bought.sig = sign::ps_unblind(sigs[2], p.t_new);
  if (!reg.verify(keys.registration) || !left.verify(keys.asset) ||
      !bought.verify(keys.asset))
    throw WalletError(WalletErrc::desync, "desync");

  const auto spent = std::find_if(
      assets_.begin(), assets_.end(),
      [&](const records::AssetRecord& a) { return a.aid == p.spent_aid; });
  if (spent == assets_.end())
    throw std::logic_error("finalize does not match a held record");
  registration_ = std::move(reg);
  assets_.erase(spent);
  assets_.push_back(std::move(left));
  assets_.push_back(std::move(bought));
}

void UserWallet::finalize_withdraw(const records::PlatformKeys& keys,
                                   const PendingWithdraw& p, const Response& r) {
  const auto& sigs = expect_sigs(r, 2);
  records::RegistrationRecord reg = p.reg_plain;
  records::AssetRecord left = p.left_plain;
  reg.sig = sign::ps_unblind(sigs[0], p.t_reg);
  left.sig = sign::ps_unblind(sigs[1], p.t_left);
  if (!reg.verify(keys.registration) || !left.verify(keys.asset))
    throw WalletError(WalletErrc::desync, "desync");

  const auto spent = std::find_if(
      assets_.begin(), assets_.end(),
      [&](const records::AssetRecord& a) { return a.aid == p.spent_aid; });
  if (spent == assets_.end())
    throw std::logic_error("finalize does not match a held record");
  registration_ = std::move(reg);
  assets_.erase(spent);
  assets_.push_back(std::move(left));
}

records::ComplianceDoc UserWallet::finalize_file(
    const records::PlatformKeys& keys, const PendingFile& p, const Response& r) {
  const auto& sigs = expect_sigs(r, 2);
  records::RegistrationRecord reg = p.reg_plain;
  records::ComplianceDoc doc = p.doc_plain;
  reg.sig = sign::ps_unblind(sigs[0], p.t_reg);
  doc.sig = sign::ps_unblind(sigs[1], p.t_doc);
  if (!reg.verify(keys.registration) || !doc.verify(keys.doc))
    throw WalletError(WalletErrc::desync, "desync");
  registration_ = std::move(reg);
  return doc;
}

std::vector<std::uint8_t> UserWallet::serialize() const {
  std::vector<std::uint8_t> out(kWalletMagic.begin(), kWalletMagic.end());
  out.push_back('\n');
  std::uint8_t usk_bytes[32];
  usk_.to_bytes(usk_bytes);
  put_line(out, "usk", std::span<const std::uint8_t>(usk_bytes, 32));
  if (registration_) put_line(out, "reg", registration_->serialize());
  for (const auto& a : assets_) put_line(out, "asset", a.serialize());
  return out;
}

std::optional<UserWallet> UserWallet::deserialize(
    std::span<const std::uint8_t> in) {
  const std::string_view text(reinterpret_cast<const char*>(in.data()),
                              in.size());
  std::optional<UserWallet> wallet;
  std::size_t pos = 0;
  bool first = true;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) return std::nullopt;
    const std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (first) {
      if (line != kWalletMagic) return std::nullopt;
      first = false;
      continue;
    }
    const std::size_t sp1 = line.find(' ');
    const std::size_t sp2 = line.rfind(' ');
    if (sp1 == std::string_view::npos || sp2 <= sp1) return std::nullopt;
    const std::string_view tag = line.substr(0, sp1);
    const auto payload = from_hex(line.substr(sp1 + 1, sp2 - sp1 - 1));
    if (!payload) return std::nullopt;
    std::uint32_t claimed = 0;
    const std::string_view crc_text = line.substr(sp2 + 1);
    if (crc_text.size() != 8) return std::nullopt;
    const auto [ptr, ec] = std::from_chars(
        crc_text.data(), crc_text.data() + crc_text.size(), claimed, 16);
    if (ec != std::errc() || ptr != crc_text.data() + crc_text.size())
      return std::nullopt;
    if (claimed != crc_of(*payload)) return std::nullopt;

    if (tag == "usk") {
      if (wallet || payload->size() != 32) return std::nullopt;
      const auto usk = Fr::from_bytes(
          std::span<const std::uint8_t, 32>(payload->data(), 32));
      if (!usk || usk->is_zero()) return std::nullopt;
      wallet.emplace(*usk);
    } else if (tag == "reg") {
      if (!wallet || wallet->registration_) return std::nullopt;
      auto reg = records::RegistrationRecord::deserialize(*payload);
      if (!reg || !(reg->usk == wallet->usk_)) return std::nullopt;
      wallet->registration_ = std::move(*reg);
    } else if (tag == "asset") {
      if (!wallet) return std::nullopt;
      auto rec = records::AssetRecord::deserialize(*payload);
      if (!rec || !(rec->usk == wallet->usk_)) return std::nullopt;
      wallet->assets_.push_back(std::move(*rec));
    } else {
      return std::nullopt;
    }
  }
  if (!wallet && !first) return std::nullopt;
  if (first) return std::nullopt;
  return wallet;
}

}  // namespace pisces::protocol
