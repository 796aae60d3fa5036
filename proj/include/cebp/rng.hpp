#pragma once

#include <cstdint>
#include <random>

namespace cebp {

using Rng = std::mt19937_64;

/// Named substream families. Every random draw in the library comes from
/// a stream identified by (master seed, tag, index), so ensembles are
/// reproducible regardless of how work is split across threads.
enum class StreamTag : std::uint64_t {
  tree = 1,
  durations = 2,
  w_sample = 3,
  tile_orientation = 4,
  query_time = 5,
  random_walk = 6,
  ensemble = 7,
  test = 99,
};

/// splitmix64 finaliser; used only to decorrelate seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, StreamTag tag, std::uint64_t index = 0) noexcept {
  std::uint64_t s = mix64(seed);
  s = mix64(s ^ static_cast<std::uint64_t>(tag));
  return mix64(s ^ index);
}

inline Rng make_stream(std::uint64_t seed, StreamTag tag, std::uint64_t index = 0) {
  return Rng(derive_seed(seed, tag, index));
}

/// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool coin(Rng& rng) { return (rng() >> 63) != 0; }

}  // namespace cebp
