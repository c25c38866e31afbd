#include "pisces/platform/platform.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

#include <zlib.h>

#include "pisces/zk/zk.hpp"

namespace pisces::platform {

namespace {

using protocol::kTagDeposit;
using protocol::kTagExchange;
using protocol::kTagFile;
using protocol::kTagJoin;
using protocol::kTagWithdraw;
using sign::PSKeyPair;
using sign::PSSignature;

// ---- persistence helpers: one payload per line, hex plus a crc32 ---------

std::uint32_t crc_of(std::span<const std::uint8_t> payload) {
  return static_cast<std::uint32_t>(
      ::crc32(0, payload.data(), static_cast<uInt>(payload.size())));
}

std::string hex_line(std::span<const std::uint8_t> payload) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string line;
  line.reserve(payload.size() * 2 + 10);
  for (std::uint8_t b : payload) {
    line.push_back(kDigits[b >> 4]);
    line.push_back(kDigits[b & 0xf]);
  }
  char tail[11];
  std::snprintf(tail, sizeof tail, " %08x\n", crc_of(payload));
  line += tail;
  return line;
}

std::vector<std::vector<std::uint8_t>> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open platform state file: " + path);
  std::vector<std::vector<std::uint8_t>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto sp = line.find(' ');
    if (sp == std::string::npos || sp % 2 != 0 || line.size() != sp + 9)
      throw std::runtime_error("corrupt platform state file: " + path);
    std::vector<std::uint8_t> payload(sp / 2);
    for (size_t i = 0; i < payload.size(); ++i) {
      unsigned v = 0;
      auto [p, ec] = std::from_chars(line.data() + 2 * i, line.data() + 2 * i + 2,
                                     v, 16);
      if (ec != std::errc() || p != line.data() + 2 * i + 2)
        throw std::runtime_error("corrupt platform state file: " + path);
      payload[i] = static_cast<std::uint8_t>(v);
    }
    unsigned crc = 0;
    auto [p, ec] = std::from_chars(line.data() + sp + 1,
                                   line.data() + line.size(), crc, 16);
    if (ec != std::errc() || p != line.data() + line.size() ||
        crc != crc_of(payload))
      throw std::runtime_error("corrupt platform state file: " + path);
    out.push_back(std::move(payload));
  }
  return out;
}

void put_u8(std::vector<std::uint8_t>& out, std::uint8_t v) { out.push_back(v); }

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 3; i >= 0; --i)
    out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 7; i >= 0; --i)
    out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_fr(std::vector<std::uint8_t>& out, const Fr& v) {
  std::uint8_t b[32];
  v.to_bytes(b);
  out.insert(out.end(), b, b + 32);
}

struct Reader {
  std::span<const std::uint8_t> in;
  bool ok = true;

  std::uint8_t u8() {
    if (in.empty()) return fail<std::uint8_t>();
    std::uint8_t v = in[0];
    in = in.subspan(1);
    return v;
  }
  std::uint16_t u16() {
    std::uint16_t v = u8();
    return static_cast<std::uint16_t>(v << 8 | u8());
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = v << 8 | u8();
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = v << 8 | u8();
    return v;
  }
  Fr fr() {
    if (in.size() < 32) return fail<Fr>();
    auto v = Fr::from_bytes(in.first<32>());
    in = in.subspan(32);
    if (!v) return fail<Fr>();
    return *v;
  }
  std::span<const std::uint8_t> take(size_t n) {
    if (in.size() < n) {
      ok = false;
      return {};
    }
    auto v = in.first(n);
    in = in.subspan(n);
    return v;
  }
  template <typename T>
  T fail() {
    ok = false;
    return T{};
  }
  bool done() const { return ok && in.empty(); }
};

std::vector<std::uint8_t> keypair_payload(const PSKeyPair& kp) {
  std::vector<std::uint8_t> out;
  put_u8(out, static_cast<std::uint8_t>(kp.sk.y.size()));
  put_fr(out, kp.sk.x);
  for (const Fr& y : kp.sk.y) put_fr(out, y);
  auto pk = kp.pk.serialize();
  put_u16(out, static_cast<std::uint16_t>(pk.size()));
  out.insert(out.end(), pk.begin(), pk.end());
  return out;
}

PSKeyPair parse_keypair(std::span<const std::uint8_t> payload, size_t slots,
                        const std::string& path) {
  Reader rd{payload};
  PSKeyPair kp;
  size_t got = rd.u8();
  kp.sk.x = rd.fr();
  for (size_t i = 0; i < slots && rd.ok; ++i) kp.sk.y.push_back(rd.fr());
  size_t pk_len = rd.u16();
  auto pk_bytes = rd.take(pk_len);
  if (!rd.done() || got != slots)
    throw std::runtime_error("corrupt platform state file: " + path);
  auto pk = sign::PSPublicKey::deserialize(pk_bytes);
  if (!pk || pk->slots() != slots)
    throw std::runtime_error("corrupt platform state file: " + path);
  kp.pk = std::move(*pk);
  return kp;
}

Response reject(Error e) {
  Response r;
  r.error = e;
  r.message = protocol::error_string(e);
  return r;
}

constexpr std::uint8_t kSettleIn = 0;
constexpr std::uint8_t kSettleOut = 1;
constexpr std::uint8_t kSettleConsume = 2;

constexpr size_t kPriceSlots = 3;
constexpr size_t kRegistrationSlots = 4;
constexpr size_t kDocSlots = 4;
constexpr size_t kAssetSlots = 5;

}  // namespace

// ---- setup and persistence -----------------------------------------------

void Platform::validate_config(const PlatformConfig& cfg) const {
  if (cfg.n_assets < 1 || cfg.n_assets > 65536)
    throw std::invalid_argument("asset count out of range");
  if (cfg.prices.size() != cfg.n_assets)
    throw std::invalid_argument("price list does not match asset count");
  for (std::uint32_t p : cfg.prices)
    if (p == 0) throw std::invalid_argument("prices must be positive");
  if (!cfg.floats.empty() && cfg.floats.size() != cfg.n_assets)
    throw std::invalid_argument("float list does not match asset count");
}

Platform::Platform(const PlatformConfig& cfg, std::uint64_t seed,
                   std::string state_dir)
    : rng_(seed), state_dir_(std::move(state_dir)) {
  validate_config(cfg);
  price_kp_ = sign::ps_keygen(kPriceSlots, rng_);
  registration_kp_ = sign::ps_keygen(kRegistrationSlots, rng_);
  doc_kp_ = sign::ps_keygen(kDocSlots, rng_);
  asset_kp_ = sign::ps_keygen(kAssetSlots, rng_);
  pub_keys_ = {price_kp_.pk, registration_kp_.pk, doc_kp_.pk, asset_kp_.pk};
  regulatory_epoch_ = cfg.regulatory_epoch;
  prices_ = cfg.prices;
  floats_ = cfg.floats.empty() ? std::vector<std::uint64_t>(prices_.size(), 0)
                               : cfg.floats;
  sign_credentials();
  if (state_dir_.empty()) return;
  std::filesystem::create_directories(state_dir_);
  if (std::filesystem::exists(state_dir_ + "/keys.bin"))
    throw std::runtime_error("state directory already initialized: " +
                             state_dir_);
  write_keys();
  write_meta();
  nonce_log_.open(state_dir_ + "/nonces.log", std::ios::app);
  uset_log_.open(state_dir_ + "/uset.log", std::ios::app);
  flow_log_.open(state_dir_ + "/flow.log", std::ios::app);
  settle_log_.open(state_dir_ + "/settle.log", std::ios::app);
  if (!nonce_log_ || !uset_log_ || !flow_log_ || !settle_log_)
    throw std::runtime_error("cannot create platform state in " + state_dir_);
}

Platform Platform::resume(std::string state_dir, std::uint64_t seed) {
  Platform p;
  p.state_dir_ = state_dir;
  const std::string keys_path = state_dir + "/keys.bin";
  auto key_lines = read_lines(keys_path);
  if (key_lines.size() != 4)
    throw std::runtime_error("corrupt platform state file: " + keys_path);
  p.price_kp_ = parse_keypair(key_lines[0], kPriceSlots, keys_path);
  p.registration_kp_ =
      parse_keypair(key_lines[1], kRegistrationSlots, keys_path);
  p.doc_kp_ = parse_keypair(key_lines[2], kDocSlots, keys_path);
  p.asset_kp_ = parse_keypair(key_lines[3], kAssetSlots, keys_path);
  p.pub_keys_ = {p.price_kp_.pk, p.registration_kp_.pk, p.doc_kp_.pk,
                 p.asset_kp_.pk};

  const std::string meta_path = state_dir + "/meta";
  auto meta_lines = read_lines(meta_path);
  if (meta_lines.size() != 1)
    throw std::runtime_error("corrupt platform state file: " + meta_path);
  {
    Reader rd{meta_lines[0]};
    if (rd.u8() != 1)
      throw std::runtime_error("corrupt platform state file: " + meta_path);
    std::uint32_t n = rd.u16() + 1u;
    p.regulatory_epoch_ = rd.u32();
    p.epoch_ = rd.u32();
    p.now_ = rd.u64();
    p.next_settlement_id_ = rd.u32();
    for (std::uint32_t i = 0; i < n && rd.ok; ++i)
      p.prices_.push_back(rd.u32());
    for (std::uint32_t i = 0; i < n && rd.ok; ++i)
      p.floats_.push_back(rd.u64());
    if (!rd.done())
      throw std::runtime_error("corrupt platform state file: " + meta_path);
    for (std::uint32_t pr : p.prices_)
      if (pr == 0)
        throw std::runtime_error("corrupt platform state file: " + meta_path);
  }

  const std::string nonce_path = state_dir + "/nonces.log";
  for (const auto& line : read_lines(nonce_path)) {
    if (line.size() != 32)
      throw std::runtime_error("corrupt platform state file: " + nonce_path);
    Bytes32 b;
    std::copy(line.begin(), line.end(), b.begin());
    if (!p.spent_.insert(b).second)
      throw std::runtime_error("corrupt platform state file: " + nonce_path);
  }
  const std::string uset_path = state_dir + "/uset.log";
  for (const auto& line : read_lines(uset_path)) {
    if (line.size() != 32)
      throw std::runtime_error("corrupt platform state file: " + uset_path);
    Bytes32 b;
    std::copy(line.begin(), line.end(), b.begin());
    if (!p.uset_.insert(b).second)
      throw std::runtime_error("corrupt platform state file: " + uset_path);
  }
  const std::string flow_path = state_dir + "/flow.log";
  for (const auto& line : read_lines(flow_path)) {
    Reader rd{line};
    FlowEntry e;
    e.ts = rd.u64();
    e.name = rd.u32();
    e.outgoing = rd.u8() != 0;
    e.amt = rd.u32();
    if (!rd.done() || e.name < 1 || e.name > p.n_assets())
      throw std::runtime_error("corrupt platform state file: " + flow_path);
    p.flow_.push_back(e);
  }
  const std::string settle_path = state_dir + "/settle.log";
  for (const auto& line : read_lines(settle_path)) {
    Reader rd{line};
    std::uint8_t kind = rd.u8();
    if (kind == kSettleConsume) {
      std::uint32_t id = rd.u32();
      auto it = std::find_if(
          p.settlement_.begin(), p.settlement_.end(),
          [&](const SettlementEntry& e) { return e.id == id; });
      if (!rd.done() || it == p.settlement_.end() || it->outgoing ||
          it->consumed)
        throw std::runtime_error("corrupt platform state file: " + settle_path);
      it->consumed = true;
      continue;
    }
    SettlementEntry e;
    e.outgoing = kind == kSettleOut;
    e.id = rd.u32();
    e.name = rd.u32();
    e.amt = rd.u32();
    e.ts = rd.u64();
    auto addr = rd.take(rd.u8());
    e.address.assign(addr.begin(), addr.end());
    if (!rd.done() || (kind != kSettleIn && kind != kSettleOut) ||
        e.name < 1 || e.name > p.n_assets() || e.id >= p.next_settlement_id_)
      throw std::runtime_error("corrupt platform state file: " + settle_path);
    p.settlement_.push_back(e);
  }

  // Never resume onto the setup stream: blind issuance must not replay
  // per-signature nonces consumed before the restart. Folding the persisted
  // state into the seed keeps restarts deterministic, and every issuance
  // appends to a log before signing, so two resumes can only share a stream
  // while neither has signed anything yet.
  auto mix = [](std::uint64_t v) {
    v ^= v >> 30;
    v *= 0xbf58476d1ce4e5b9ULL;
    v ^= v >> 27;
    v *= 0x94d049bb133111ebULL;
    return v ^ (v >> 31);
  };
  p.rng_ = group::SeededRng(
      mix(seed ^ mix(p.spent_.size() + 1) ^ mix(p.uset_.size() + 3) ^
          mix(p.flow_.size() + 5) ^ mix(p.settlement_.size() + 7) ^
          mix(p.epoch_ + 9) ^ mix(p.now_ + 11)));

  p.sign_credentials();
  p.nonce_log_.open(nonce_path, std::ios::app);
  p.uset_log_.open(uset_path, std::ios::app);
  p.flow_log_.open(flow_path, std::ios::app);
  p.settle_log_.open(settle_path, std::ios::app);
  if (!p.nonce_log_ || !p.uset_log_ || !p.flow_log_ || !p.settle_log_)
    throw std::runtime_error("cannot reopen platform state in " + state_dir);
  return p;
}

void Platform::write_keys() {
  std::ofstream out(state_dir_ + "/keys.bin", std::ios::trunc);
  for (const PSKeyPair* kp :
       {&price_kp_, &registration_kp_, &doc_kp_, &asset_kp_})
    out << hex_line(keypair_payload(*kp));
  out.flush();
  if (!out) throw std::runtime_error("cannot write " + state_dir_ + "/keys.bin");
}

void Platform::write_meta() {
  if (state_dir_.empty()) return;
  std::vector<std::uint8_t> payload;
  put_u8(payload, 1);
  put_u16(payload, static_cast<std::uint16_t>(n_assets() - 1));
  put_u32(payload, regulatory_epoch_);
  put_u32(payload, epoch_);
  put_u64(payload, now_);
  put_u32(payload, next_settlement_id_);
  for (std::uint32_t p : prices_) put_u32(payload, p);
  for (std::uint64_t f : floats_) put_u64(payload, f);
  const std::string tmp = state_dir_ + "/meta.tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << hex_line(payload);
    out.flush();
    if (!out) throw std::runtime_error("cannot write " + tmp);
  }
  std::filesystem::rename(tmp, state_dir_ + "/meta");
}

void Platform::append_log(std::ofstream& out,
                          std::span<const std::uint8_t> payload) {
  if (state_dir_.empty()) return;
  out << hex_line(payload);
  out.flush();
  if (!out) throw std::runtime_error("platform state write failed");
}

// ---- prices and the simulated chain --------------------------------------

std::uint32_t Platform::price(std::uint32_t name) const {
  if (name < 1 || name > n_assets())
    throw std::out_of_range("unknown asset index");
  return prices_[name - 1];
}

void Platform::sign_credentials() {
  credentials_.clear();
  for (std::uint32_t i = 0; i < n_assets(); ++i) {
    records::PriceCredential c;
    c.time = Fr::from_u64(epoch_);
    c.name = Fr::from_u64(i + 1);
    c.pr = Fr::from_u64(prices_[i]);
    auto msgs = c.messages();
    c.sig = sign::ps_sign(price_kp_.sk, msgs, rng_);
    credentials_.push_back(std::move(c));
  }
}

PriceFeedUpdate Platform::price_feed() const {
  return {epoch_, prices_, credentials_};
}

PriceFeedUpdate Platform::publish_prices(
    const std::vector<std::uint32_t>& prices) {
  if (prices.size() != n_assets())
    throw std::invalid_argument("price list does not match asset count");
  for (std::uint32_t p : prices)
    if (p == 0) throw std::invalid_argument("prices must be positive");
  epoch_ += 1;
  prices_ = prices;
  sign_credentials();
  write_meta();
  return price_feed();
}

void Platform::advance_time(std::uint64_t seconds) {
  now_ += seconds;
  write_meta();
}

std::uint32_t Platform::settle_incoming(std::uint32_t name, std::uint32_t amt) {
  if (name < 1 || name > n_assets())
    throw std::invalid_argument("unknown asset index");
  if (amt == 0) throw std::invalid_argument("settlement amount must be positive");
  SettlementEntry e{next_settlement_id_++, false, name, amt, now_, {}, false};
  settlement_.push_back(e);
  std::vector<std::uint8_t> payload;
  put_u8(payload, kSettleIn);
  put_u32(payload, e.id);
  put_u32(payload, e.name);
  put_u32(payload, e.amt);
  put_u64(payload, e.ts);
  put_u8(payload, 0);
  append_log(settle_log_, payload);
  write_meta();
  return e.id;
}

// ---- request handling ----------------------------------------------------

PSSignature Platform::blind(const PSKeyPair& kp, const G1Affine& commitment) {
  return sign::ps_blind_sign(kp.sk, commitment, rng_);
}

bool Platform::fresh(const Fr& nonce) const {
  Bytes32 b;
  nonce.to_bytes(b.data());
  return spent_.find(b) == spent_.end();
}

void Platform::spend(const Fr& nonce) {
  Bytes32 b;
  nonce.to_bytes(b.data());
  spent_.insert(b);
  append_log(nonce_log_, b);
}

bool Platform::nonce_spent(const Fr& nonce) const { return !fresh(nonce); }

bool Platform::user_registered(const G1Affine& upk) const {
  Bytes32 b;
  group::g1_to_bytes(upk, b.data());
  return uset_.find(b) != uset_.end();
}

Response Platform::handle(std::span<const std::uint8_t> request) {
  protocol::FieldView view;
  auto run = [&](auto&& req, auto&& fn) {
    view_log_.push_back(std::move(view));
    if (!req) return reject(Error::invalid_request);
    return fn(*req);
  };
  switch (protocol::request_type(request).value_or(0)) {
    case kTagJoin:
      return run(protocol::JoinRequest::deserialize(request, &view),
                 [&](const auto& r) { return handle_join(r); });
    case kTagDeposit:
      return run(protocol::DepositRequest::deserialize(request, &view),
                 [&](const auto& r) { return handle_deposit(r); });
    case kTagExchange:
      return run(protocol::ExchangeRequest::deserialize(request, &view),
                 [&](const auto& r) { return handle_exchange(r); });
    case kTagWithdraw:
      return run(protocol::WithdrawRequest::deserialize(request, &view),
                 [&](const auto& r) { return handle_withdraw(r); });
    case kTagFile:
      return run(protocol::FileRequest::deserialize(request, &view),
                 [&](const auto& r) { return handle_file(r); });
    default:
      return reject(Error::invalid_request);
  }
}

Response Platform::handle_join(const protocol::JoinRequest& req) {
  if (req.pub.epoch != epoch_) return reject(Error::stale_epoch);
  if (req.pub.upk == G1Affine::infinity()) return reject(Error::invalid_request);
  Bytes32 upk_bytes;
  group::g1_to_bytes(req.pub.upk, upk_bytes.data());
  if (uset_.contains(upk_bytes)) return reject(Error::already_registered);

  protocol::PointCursor cur(req.points);
  auto st = protocol::join_statement(pub_keys_, req.pub, cur);
  auto proof = zk::Proof::deserialize(req.proof);
  if (!st || !proof ||
      !zk::verify(*st, *proof, protocol::tx_context(kTagJoin, epoch_)))
    return reject(Error::invalid_proof);

  uset_.insert(upk_bytes);
  append_log(uset_log_, upk_bytes);
  Response r;
  r.sigs.push_back(
      blind(registration_kp_, st->commitments[protocol::kJoinBlindReg].point));
  return r;
}

Response Platform::handle_deposit(const protocol::DepositRequest& req) {
  if (req.pub.epoch != epoch_) return reject(Error::stale_epoch);
  if (req.pub.name < 1 || req.pub.name > n_assets() || req.pub.amt == 0 ||
      req.pub.price != prices_[req.pub.name - 1])
    return reject(Error::settlement_mismatch);
  auto entry = std::find_if(
      settlement_.begin(), settlement_.end(), [&](const SettlementEntry& e) {
        return !e.outgoing && !e.consumed && e.name == req.pub.name &&
               e.amt == req.pub.amt;
      });
  if (entry == settlement_.end()) return reject(Error::settlement_mismatch);

  protocol::PointCursor cur(req.points);
  auto st = protocol::deposit_statement(pub_keys_, req.pub, cur);
  auto proof = zk::Proof::deserialize(req.proof);
  if (!st || !proof ||
      !zk::verify(*st, *proof, protocol::tx_context(kTagDeposit, epoch_)))
    return reject(Error::invalid_proof);

  entry->consumed = true;
  std::vector<std::uint8_t> consume;
  put_u8(consume, kSettleConsume);
  put_u32(consume, entry->id);
  append_log(settle_log_, consume);
  flow_.push_back({now_, req.pub.name, false, req.pub.amt});
  std::vector<std::uint8_t> fl;
  put_u64(fl, now_);
  put_u32(fl, req.pub.name);
  put_u8(fl, 0);
  put_u32(fl, req.pub.amt);
  append_log(flow_log_, fl);
  Response r;
  r.sigs.push_back(
      blind(asset_kp_, st->commitments[protocol::kDepositBlindAsset].point));
  return r;
}

Response Platform::handle_exchange(const protocol::ExchangeRequest& req) {
  if (req.pub.epoch != epoch_) return reject(Error::stale_epoch);
  if (req.pub.rid == req.pub.aid || !fresh(req.pub.rid) || !fresh(req.pub.aid))
    return reject(Error::double_spend);

  protocol::PointCursor cur(req.points);
  auto st = protocol::exchange_statement(pub_keys_, req.pub, cur);
  auto proof = zk::Proof::deserialize(req.proof);
  if (!st || !proof ||
      !zk::verify(*st, *proof, protocol::tx_context(kTagExchange, epoch_)))
    return reject(Error::invalid_proof);

  spend(req.pub.rid);
  spend(req.pub.aid);
  Response r;
  r.sigs.push_back(blind(registration_kp_,
                         st->commitments[protocol::kExchangeBlindReg].point));
  r.sigs.push_back(
      blind(asset_kp_, st->commitments[protocol::kExchangeBlindLeft].point));
  r.sigs.push_back(
      blind(asset_kp_, st->commitments[protocol::kExchangeBlindNew].point));
  return r;
}

Response Platform::handle_withdraw(const protocol::WithdrawRequest& req) {
  if (req.pub.epoch != epoch_) return reject(Error::stale_epoch);
  if (req.pub.name < 1 || req.pub.name > n_assets() || req.pub.amt == 0)
    return reject(Error::invalid_request);
  if (req.pub.rid == req.pub.aid || !fresh(req.pub.rid) || !fresh(req.pub.aid))
    return reject(Error::double_spend);

  protocol::PointCursor cur(req.points);
  auto st = protocol::withdraw_statement(pub_keys_, req.pub,
                                         prices_[req.pub.name - 1], cur);
  auto proof = zk::Proof::deserialize(req.proof);
  if (!st || !proof ||
      !zk::verify(*st, *proof, protocol::tx_context(kTagWithdraw, epoch_)))
    return reject(Error::invalid_proof);

  spend(req.pub.rid);
  spend(req.pub.aid);
  flow_.push_back({now_, req.pub.name, true, req.pub.amt});
  std::vector<std::uint8_t> fl;
  put_u64(fl, now_);
  put_u32(fl, req.pub.name);
  put_u8(fl, 1);
  put_u32(fl, req.pub.amt);
  append_log(flow_log_, fl);
  SettlementEntry e{next_settlement_id_++, true,        req.pub.name,
                    req.pub.amt,           now_,        req.pub.address,
                    false};
  settlement_.push_back(e);
  std::vector<std::uint8_t> se;
  put_u8(se, kSettleOut);
  put_u32(se, e.id);
  put_u32(se, e.name);
  put_u32(se, e.amt);
  put_u64(se, e.ts);
  put_u8(se, static_cast<std::uint8_t>(e.address.size()));
  se.insert(se.end(), e.address.begin(), e.address.end());
  append_log(settle_log_, se);
  write_meta();
  Response r;
  r.sigs.push_back(blind(registration_kp_,
                         st->commitments[protocol::kWithdrawBlindReg].point));
  r.sigs.push_back(
      blind(asset_kp_, st->commitments[protocol::kWithdrawBlindLeft].point));
  return r;
}

Response Platform::handle_file(const protocol::FileRequest& req) {
  if (req.pub.epoch != epoch_) return reject(Error::stale_epoch);
  if (req.pub.au != regulatory_epoch_) return reject(Error::stale_au);
  if (!user_registered(req.pub.upk)) return reject(Error::unregistered);
  if (!fresh(req.pub.rid)) return reject(Error::double_spend);

  protocol::PointCursor cur(req.points);
  auto st = protocol::file_statement(pub_keys_, req.pub, cur);
  auto proof = zk::Proof::deserialize(req.proof);
  if (!st || !proof ||
      !zk::verify(*st, *proof, protocol::tx_context(kTagFile, epoch_)))
    return reject(Error::invalid_proof);

  spend(req.pub.rid);
  Response r;
  r.sigs.push_back(
      blind(registration_kp_, st->commitments[protocol::kFileBlindReg].point));
  r.sigs.push_back(
      blind(doc_kp_, st->commitments[protocol::kFileBlindDoc].point));
  return r;
}

// ---- audit ---------------------------------------------------------------

CheckReport Platform::check(std::uint64_t window_seconds) const {
  CheckReport rep;
  rep.window = window_seconds;
  const std::uint64_t cutoff =
      now_ > window_seconds ? now_ - window_seconds : 0;
  for (std::uint32_t name = 1; name <= n_assets(); ++name) {
    CheckReport::Coin coin;
    coin.name = name;
    coin.reserve = static_cast<std::int64_t>(floats_[name - 1]);
    for (const FlowEntry& e : flow_) {
      if (e.name != name) continue;
      if (e.outgoing) {
        coin.reserve -= e.amt;
        if (e.ts >= cutoff) coin.window_outflow += e.amt;
      } else {
        coin.reserve += e.amt;
      }
    }
    coin.pass = coin.reserve >= 0 &&
                static_cast<std::uint64_t>(coin.reserve) >= coin.window_outflow;
    rep.pass = rep.pass && coin.pass;
    rep.coins.push_back(coin);
  }
  return rep;
}

std::vector<std::uint8_t> Platform::snapshot() const {
  std::vector<std::uint8_t> out;
  put_u32(out, epoch_);
  put_u32(out, regulatory_epoch_);
  put_u64(out, now_);
  put_u32(out, next_settlement_id_);
  put_u32(out, n_assets());
  for (std::uint32_t p : prices_) put_u32(out, p);
  for (std::uint64_t f : floats_) put_u64(out, f);
  put_u32(out, static_cast<std::uint32_t>(spent_.size()));
  for (const Bytes32& b : spent_) out.insert(out.end(), b.begin(), b.end());
  put_u32(out, static_cast<std::uint32_t>(uset_.size()));
  for (const Bytes32& b : uset_) out.insert(out.end(), b.begin(), b.end());
  put_u32(out, static_cast<std::uint32_t>(flow_.size()));
  for (const FlowEntry& e : flow_) {
    put_u64(out, e.ts);
    put_u32(out, e.name);
    put_u8(out, e.outgoing ? 1 : 0);
    put_u32(out, e.amt);
  }
  put_u32(out, static_cast<std::uint32_t>(settlement_.size()));
  for (const SettlementEntry& e : settlement_) {
    put_u32(out, e.id);
    put_u8(out, e.outgoing ? 1 : 0);
    put_u32(out, e.name);
    put_u32(out, e.amt);
    put_u64(out, e.ts);
    put_u8(out, static_cast<std::uint8_t>(e.address.size()));
    out.insert(out.end(), e.address.begin(), e.address.end());
    put_u8(out, e.consumed ? 1 : 0);
  }
  return out;
}

bool authority_verify(const records::PlatformKeys& keys,
                      const records::ComplianceDoc& doc,
                      std::uint32_t expected_au) {
  return doc.au == Fr::from_u64(expected_au) && doc.verify(keys.doc);
}

}  // namespace pisces::platform
