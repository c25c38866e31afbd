// Randomness sources: a system-entropy RNG for live use and a seeded,
// reproducible RNG for scenario replay and tests.
#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "pisces/group/field.hpp"

namespace pisces::group {

class Rng {
 public:
  virtual ~Rng() = default;
  virtual void fill(std::span<std::uint8_t> out) = 0;

  // uniform scalar via 64-byte wide reduction
  Fr scalar() {
    std::uint8_t buf[64];
    fill(std::span<std::uint8_t>(buf, 64));
    return Fr::from_bytes_wide(std::span<const std::uint8_t, 64>(buf, 64));
  }

  Fr nonzero_scalar() {
    for (;;) {
      const Fr s = scalar();
      if (!s.is_zero()) return s;
    }
  }

  std::uint64_t u64_value() {
    std::uint8_t buf[8];
    fill(std::span<std::uint8_t>(buf, 8));
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | buf[i];
    return v;
  }
};

class SeededRng final : public Rng {
 public:
  explicit SeededRng(std::uint64_t seed) : gen_(seed) {}

  void fill(std::span<std::uint8_t> out) override {
    for (auto& b : out) {
      if (have_ == 0) {
        word_ = gen_();
        have_ = 8;
      }
      b = static_cast<std::uint8_t>(word_ & 0xff);
      word_ >>= 8;
      --have_;
    }
  }

 private:
  std::mt19937_64 gen_;
  std::uint64_t word_ = 0;
  int have_ = 0;
};

class SystemRng final : public Rng {
 public:
  void fill(std::span<std::uint8_t> out) override {
    for (auto& b : out) {
      if (have_ == 0) {
        word_ = (static_cast<std::uint64_t>(dev_()) << 32) | dev_();
        have_ = 8;
      }
      b = static_cast<std::uint8_t>(word_ & 0xff);
      word_ >>= 8;
      --have_;
    }
  }

 private:
  std::random_device dev_;
  std::uint64_t word_ = 0;
  int have_ = 0;
};

}  // namespace pisces::group
