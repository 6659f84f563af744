#pragma once

#include <cstdint>
#include <initializer_list>

namespace causens {

// SplitMix64 finalizer. Used to derive independent per-task seeds from the
// single top-level seed so that results do not depend on execution order.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// derive_seed(s, {a, b, c}) = mix(mix(mix(s ^ a) ^ b) ^ c), folded left.
constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                    std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t h = mix64(seed);
  for (auto p : path) h = mix64(h ^ p);
  return h;
}

// Stream tags used by the pipeline.
inline constexpr std::uint64_t kStreamSubsample = 0x5u;
inline constexpr std::uint64_t kStreamRegression = 0x7u;
inline constexpr std::uint64_t kStreamSynthetic = 0xbu;
inline constexpr std::uint64_t kStreamTree = 0xdu;

}  // namespace causens
