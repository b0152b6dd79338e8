#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace statclaim {

/// Seeded generator with draws defined by this library rather than by the
/// standard distributions, so sequences are identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, n); n > 0.
  std::size_t index(std::size_t n);
  /// Uniform in [lo, hi].
  int between(int lo, int hi);
  /// Uniform in [0, 1).
  double unit();
  bool coin() { return (next() >> 63) != 0; }

  template <typename T>
  const T& pick(const std::vector<T>& items) {
    return items[index(items.size())];
  }

  /// Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[index(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace statclaim
