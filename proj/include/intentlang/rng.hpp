#pragma once

#include <cstdint>

namespace intentlang {

/// Counter-based generator: draw k of a stream with seed s is
/// splitmix64's k-th output from initial state s. No hidden state, so a
/// GameState carrying (seed, counter) replays exactly.
struct RngState {
  std::uint64_t seed = 0;
  std::uint64_t counter = 0;

  friend bool operator==(const RngState&, const RngState&) = default;
};

constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t rng_draw(std::uint64_t seed, std::uint64_t counter) noexcept {
  return splitmix64_mix(seed + (counter + 1) * 0x9E3779B97F4A7C15ULL);
}

/// Exact Bernoulli(num/den) test on a 64-bit draw: true iff draw / 2^64 < num / den.
constexpr bool bernoulli(std::uint64_t draw, std::uint64_t num, std::uint64_t den) noexcept {
  if (num >= den) return true;
  return static_cast<unsigned __int128>(draw) * den < static_cast<unsigned __int128>(num) << 64;
}

} // namespace intentlang
