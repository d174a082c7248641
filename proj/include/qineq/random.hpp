#pragma once

#include <cstdint>
#include <random>

namespace qineq {

// SplitMix64 finalizer; a bijection on 64-bit words with good avalanche.
inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Stateless per-stream seed: the stream index is hashed together with the
// master seed so replication r can be regenerated in isolation.
inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
  return splitmix64(splitmix64(master) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed) { return Engine{seed}; }

// Uniform on the open interval (0,1), built from the top 53 bits so the
// mapping does not depend on the standard library's distributions.
inline double uniform_open(Engine& engine) {
  return (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;
}

// Uniform index in [0, n) by rejection, portable across standard libraries.
inline std::uint64_t uniform_index(Engine& engine, std::uint64_t n) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = engine();
  } while (x >= limit);
  return x % n;
}

}  // namespace qineq
