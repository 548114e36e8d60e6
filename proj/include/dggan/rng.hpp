#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace dggan {

/// Seeded random stream.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The distributions below are spelled out here instead of using
/// <random>'s distribution classes, whose algorithms are implementation
/// defined; this keeps seeded runs identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Independent stream derived from a master seed and a stream name
  /// ("split", "init", "train", "eval/0.5", ...).
  static Rng stream(std::uint64_t seed, std::string_view name);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Unbiased integer in [0, n). n must be positive.
  std::size_t index(std::size_t n);

  /// Standard normal deviate (Marsaglia polar method).
  double normal();

  template <class T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// 64-bit FNV-1a, used for stream names.
std::uint64_t fnv1a(std::string_view text);

}  // namespace dggan
