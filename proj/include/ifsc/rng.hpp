#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace ifsc {

inline constexpr uint64_t kFnvOffset = 14695981039346656037ull;
inline constexpr uint64_t kFnvPrime = 1099511628211ull;

// FNV-1a over raw bytes. Used for feature hashing and for deriving
// sub-stream seeds from string tags; must stay stable across releases
// because hashed feature indices are baked into saved models.
inline uint64_t fnv1a64(std::string_view bytes, uint64_t state = kFnvOffset) {
  for (unsigned char c : bytes) {
    state ^= c;
    state *= kFnvPrime;
  }
  return state;
}

// SplitMix64 (Steele, Lea & Flood). Every seeded shuffle and sample in the
// project goes through this generator instead of <random> so that results
// are identical across standard libraries and platforms.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Unbiased integer in [0, n); n must be positive.
  uint64_t below(uint64_t n) {
    const uint64_t limit = ~0ull - ~0ull % n;
    uint64_t v = next();
    while (v >= limit) v = next();
    return v % n;
  }

  // Uniform double in [0, 1) with 53 bits of randomness.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  uint64_t state_;
};

// Seed for a named sub-stream, e.g. per-class sampling inside one split.
inline uint64_t derive_seed(uint64_t seed, std::string_view tag) {
  return fnv1a64(tag, kFnvOffset ^ seed);
}

// Fisher-Yates with SplitMix64 draws.
template <typename T>
void seeded_shuffle(std::vector<T>& values, SplitMix64& rng) {
  for (size_t i = values.size(); i > 1; --i) {
    const size_t j = static_cast<size_t>(rng.below(i));
    using std::swap;
    swap(values[i - 1], values[j]);
  }
}

}  // namespace ifsc
