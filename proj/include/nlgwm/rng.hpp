#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace nlgwm {

// Seeded random stream. Every pipeline stage draws from its own stream keyed
// by (seed, stage name), so rerunning one stage does not shift another.
//
// Only the raw mt19937_64 output is used; bounded draws and shuffles are done
// here rather than through <random> distributions, whose results differ
// between standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix(seed)) {}
  Rng(std::uint64_t seed, std::string_view stage) : engine_(mix(seed ^ fnv1a(stage))) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % bound;
  }

  // Uniform in [0, 1).
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

  // k distinct indices from [0, n) in draw order (partial Fisher-Yates).
  std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    if (k > n) k = n;
    for (std::size_t i = 0; i < k; ++i) {
      std::swap(idx[i], idx[i + below(n - i)]);
    }
    idx.resize(k);
    return idx;
  }

  static constexpr std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    return h;
  }

  static constexpr std::uint64_t mix(std::uint64_t x) {
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace nlgwm
