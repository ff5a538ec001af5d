#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace cva {

/// Philox4x32-10 block function (Salmon et al. 2011, Random123).
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t m0 = 0xD2511F53u, m1 = 0xCD9E8D57u;
  constexpr std::uint32_t w0 = 0x9E3779B9u, w1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t{m0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{m1} * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += w0;
    key[1] += w1;
  }
  return ctr;
}

/// Counter-based stream: key = seed, counter = (stream id, substream, block).
/// Two streams with different (id, substream) never overlap, and a stream's
/// output depends only on its coordinates, not on who else draws when.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint32_t substream = 0)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        ctr_{static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32), substream, 0u} {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (used_ == 2) {
      block_ = philox4x32(ctr_, key_);
      ++ctr_[3];
      used_ = 0;
    }
    const std::size_t i = 2 * used_++;
    return (std::uint64_t{block_[i]} << 32) | block_[i + 1];
  }

 private:
  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> ctr_;
  std::array<std::uint32_t, 4> block_{};
  std::size_t used_ = 2;
};

/// Uniform double in [0, 1) with 53 random bits. Platform independent, unlike
/// std::uniform_real_distribution.
template <class Rng>
double uniform01(Rng& rng) {
  static_assert(Rng::max() == std::numeric_limits<std::uint64_t>::max(), "needs a 64-bit generator");
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform double in (0, 1].
template <class Rng>
double uniform01_open_low(Rng& rng) {
  return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

/// Two independent standard normals (Box-Muller).
template <class Rng>
std::array<double, 2> gaussian_pair(Rng& rng) {
  const double r = std::sqrt(-2.0 * std::log(uniform01_open_low(rng)));
  const double a = 2.0 * std::numbers::pi * uniform01(rng);
  return {r * std::cos(a), r * std::sin(a)};
}

}  // namespace cva
