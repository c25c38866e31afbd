#include "pisces/group/hash.hpp"

#include <openssl/evp.h>

#include <array>
#include <cassert>
#include <cstring>
#include <stdexcept>

namespace pisces::group {
namespace {

std::array<std::uint8_t, 64> tagged_sha512(std::string_view tag,
                                           std::span<const std::uint8_t> data,
                                           const std::uint8_t* suffix, size_t sfx_len) {
  assert(tag.size() < 256);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw std::runtime_error("EVP_MD_CTX_new failed");
  EVP_DigestInit_ex(ctx, EVP_sha512(), nullptr);
  const std::uint8_t tag_len = static_cast<std::uint8_t>(tag.size());
  EVP_DigestUpdate(ctx, &tag_len, 1);
  EVP_DigestUpdate(ctx, tag.data(), tag.size());
  if (!data.empty()) EVP_DigestUpdate(ctx, data.data(), data.size());
  if (sfx_len) EVP_DigestUpdate(ctx, suffix, sfx_len);
  std::array<std::uint8_t, 64> out;
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, out.data(), &len);
  EVP_MD_CTX_free(ctx);
  assert(len == 64);
  return out;
}

}  // namespace

Fr hash_to_scalar(std::string_view tag, std::span<const std::uint8_t> data) {
  const auto d = tagged_sha512(tag, data, nullptr, 0);
  return Fr::from_bytes_wide(std::span<const std::uint8_t, 64>(d));
}

G1Affine hash_to_g1(std::string_view tag, std::span<const std::uint8_t> data) {
  for (unsigned ctr = 0; ctr < 256; ++ctr) {
    const std::uint8_t c = static_cast<std::uint8_t>(ctr);
    const auto d = tagged_sha512(tag, data, &c, 1);
    // x = BE(d[0..48)) mod p, via a left-padded 64-byte reduction
    std::array<std::uint8_t, 64> wide{};
    std::memcpy(wide.data() + 16, d.data(), 48);
    const Fp x = Fp::from_bytes_wide(std::span<const std::uint8_t, 64>(wide));
    const Fp rhs = x.square() * x + g1_b();
    const auto y = rhs.sqrt();
    if (!y) continue;
    Fp yy = *y;
    const bool want_odd = (d[48] & 1) != 0;
    if (yy.is_odd() != want_odd) yy = -yy;
    return G1Affine{x, yy};
  }
  throw std::runtime_error("hash_to_g1: no curve point found");  // cryptographically unreachable
}

}  // namespace pisces::group
