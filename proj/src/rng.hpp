#pragma once

#include <cstdint>

namespace dspec {

// Counter-based keyed randomness: every random quantity is a pure function of
// (seed, key...), so sample i or coordinate h never depends on evaluation
// order or worker count.

constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) {
  return mix64(seed ^ mix64(value + 0x632be59bd9b4e019ULL));
}

/// Uniform double in [0,1) from the top 53 bits.
constexpr double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Small sequential stream keyed by (seed, stream id).
class KeyedStream {
 public:
  constexpr KeyedStream(std::uint64_t seed, std::uint64_t stream)
      : state_(hash_combine(seed, stream)) {}

  constexpr std::uint64_t next() { return mix64(state_ += 0x9e3779b97f4a7c15ULL); }
  constexpr double uniform() { return to_unit(next()); }

 private:
  std::uint64_t state_;
};

}  // namespace dspec
