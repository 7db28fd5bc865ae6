#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace ldslab {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers:
/// as easy as 1, 2, 3"). Stateless: output depends only on counter and key.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter block(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
             static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
             static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// Gaussian noise addressable by (seed, trial, time, coordinate). Any single
/// entry can be regenerated without touching the others.
class NoiseField {
 public:
  explicit constexpr NoiseField(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  /// Two independent uniforms in (0, 1) with 53-bit resolution.
  std::array<double, 2> uniforms(std::uint64_t trial, std::uint32_t time,
                                 std::uint32_t coordinate) const {
    const auto out = Philox4x32::block(
        {time, coordinate, static_cast<std::uint32_t>(trial),
         static_cast<std::uint32_t>(trial >> 32)},
        {static_cast<std::uint32_t>(seed_),
         static_cast<std::uint32_t>(seed_ >> 32)});
    return {to_unit(out[0], out[1]), to_unit(out[2], out[3])};
  }

  /// Standard normal via Box-Muller (cosine branch only).
  double normal(std::uint64_t trial, std::uint32_t time,
                std::uint32_t coordinate) const {
    const auto u = uniforms(trial, time, coordinate);
    return std::sqrt(-2.0 * std::log(u[0])) *
           std::cos(2.0 * std::numbers::pi * u[1]);
  }

 private:
  static double to_unit(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = ((std::uint64_t{hi} << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t seed_;
};

/// Sequential 64-bit engine on top of Philox, usable with <random>
/// distributions. Stream position is an explicit counter.
class PhiloxEngine {
 public:
  using result_type = std::uint64_t;

  explicit PhiloxEngine(std::uint64_t seed, std::uint64_t stream = 0)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    if (slot_ == 2) {
      buffer_ = Philox4x32::block(
          {static_cast<std::uint32_t>(position_),
           static_cast<std::uint32_t>(position_ >> 32),
           static_cast<std::uint32_t>(stream_),
           static_cast<std::uint32_t>(stream_ >> 32)},
          key_);
      ++position_;
      slot_ = 0;
    }
    const auto hi = buffer_[2 * slot_];
    const auto lo = buffer_[2 * slot_ + 1];
    ++slot_;
    return (std::uint64_t{hi} << 32) | lo;
  }

 private:
  Philox4x32::Key key_;
  std::uint64_t stream_;
  std::uint64_t position_ = 0;
  Philox4x32::Counter buffer_{};
  int slot_ = 2;
};

}  // namespace ldslab
