#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A draw is a
// pure function of (key, counter), so any trajectory's stream can be
// regenerated independently of how work is split between threads.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace occtime::rng {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

namespace detail {

inline constexpr std::uint32_t kM0 = 0xD2511F53u;
inline constexpr std::uint32_t kM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kW1 = 0xBB67AE85u;

constexpr void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace detail

constexpr Counter philox4x32_10(Counter ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += detail::kW0;
      key[1] += detail::kW1;
    }
    std::uint32_t hi0 = 0, lo0 = 0, hi1 = 0, lo1 = 0;
    detail::mulhilo(detail::kM0, ctr[0], hi0, lo0);
    detail::mulhilo(detail::kM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

inline Key key_from_seed(std::uint64_t seed) {
  return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

/// Uniform in the open interval (0, 1) from the 52 high bits; k + 1/2 is exact
/// in a double for k < 2^52, so neither endpoint is reachable.
inline double to_unit_open(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t u = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return (static_cast<double>(u >> 12) + 0.5) * 0x1.0p-52;
}

struct NormalPair {
  double first = 0.0;
  double second = 0.0;
};

/// Two independent standard normals from one block (Box-Muller).
inline NormalPair normal_pair(const Counter& block) {
  const double u1 = to_unit_open(block[0], block[1]);
  const double u2 = to_unit_open(block[2], block[3]);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

/// Normals for (stream, index): counter = (index, stream lo, stream hi, 0).
inline NormalPair normal_pair(const Key& key, std::uint64_t stream, std::uint32_t index) {
  const Counter ctr = {index, static_cast<std::uint32_t>(stream),
                       static_cast<std::uint32_t>(stream >> 32), 0u};
  return normal_pair(philox4x32_10(ctr, key));
}

}  // namespace occtime::rng
