// Domain-separated hashing into the scalar field and into G1.
#pragma once

#include <cstdint>
#include <span>
#include <string_view>

#include "pisces/group/curve.hpp"

namespace pisces::group {

// SHA-512(len(tag) || tag || data) reduced into Fr. The tag must be < 256 bytes.
Fr hash_to_scalar(std::string_view tag, std::span<const std::uint8_t> data);

// Try-and-increment onto the curve: x from the first 48 digest bytes mod p,
// y-parity chosen by digest byte 48. Same domain separation as hash_to_scalar.
G1Affine hash_to_g1(std::string_view tag, std::span<const std::uint8_t> data);

}  // namespace pisces::group
