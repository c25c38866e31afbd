// Shared helpers for the test binaries: vector loading and hex codecs.
#pragma once

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace testutil {

inline std::string vectors_dir() {
  if (const char* env = std::getenv("PISCES_VECTORS")) return env;
  return "tests/vectors";
}

inline nlohmann::json load_vectors(const std::string& name) {
  const std::string path = vectors_dir() + "/" + name;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open vector file: " + path);
  nlohmann::json j;
  in >> j;
  return j;
}

inline std::string to_hex(const std::uint8_t* data, size_t len) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (size_t i = 0; i < len; ++i) {
    out.push_back(digits[data[i] >> 4]);
    out.push_back(digits[data[i] & 15]);
  }
  return out;
}

inline std::vector<std::uint8_t> from_hex(const std::string& hex) {
  auto nib = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw std::runtime_error("bad hex digit");
  };
  if (hex.size() % 2) throw std::runtime_error("odd hex length");
  std::vector<std::uint8_t> out(hex.size() / 2);
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = static_cast<std::uint8_t>((nib(hex[2 * i]) << 4) | nib(hex[2 * i + 1]));
  return out;
}

}  // namespace testutil
