#pragma once

// Named random sub-streams derived from one 64-bit seed.
//
// A stream is just a key; children are derived by hashing a purpose string
// or an index into the key. Because every consumer derives its own engine
// from a key rather than sharing one engine, results do not depend on the
// order in which parallel workers run.

#include <cstdint>
#include <random>
#include <string_view>

namespace gradeig {

using Rng = std::mt19937_64;

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

  RngStream child(std::string_view purpose) const { return RngStream(key_, hash(purpose)); }
  RngStream child(std::uint64_t index) const { return RngStream(key_, mix(index + 0x9e3779b97f4a7c15ULL)); }

  Rng engine() const {
    std::seed_seq seq{static_cast<std::uint32_t>(key_), static_cast<std::uint32_t>(key_ >> 32)};
    return Rng(seq);
  }

  std::uint64_t key() const noexcept { return key_; }

 private:
  RngStream(std::uint64_t parent, std::uint64_t salt) : key_(mix(parent ^ mix(salt))) {}

  static std::uint64_t mix(std::uint64_t z) noexcept {  // splitmix64 finalizer
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  static std::uint64_t hash(std::string_view s) noexcept {  // FNV-1a
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    return h;
  }

  std::uint64_t key_;
};

inline double standard_normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }
inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace gradeig
