#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <utility>

namespace stylo {

/// SplitMix64 finaliser; used to derive independent seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Seedable generator whose output is identical on every platform: the
/// engine is std::mt19937_64 (its sequence is fixed by the C++ standard) and
/// all derived draws use the integer algorithms below rather than the
/// implementation-defined std distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  /// Seed derived from a base seed and a list of stream tags.
  static std::uint64_t derive(std::uint64_t seed, std::initializer_list<std::uint64_t> tags);

  std::uint64_t next() { return engine_(); }
  /// Uniform integer in [0, bound) by rejection on the top bits (no modulo bias).
  std::uint64_t below(std::uint64_t bound);
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

  /// Fisher-Yates shuffle driven by below().
  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace stylo
