#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace wavecurve {

/// xoshiro256** generator. Its output, and every draw helper below, is
/// specified bit-for-bit so results do not depend on the standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer in [0, n), unbiased (rejection sampling).
  std::uint64_t below(std::uint64_t n);
  /// Uniform integer in [lo, hi].
  int between(int lo, int hi);
  /// Standard normal (Marsaglia polar method).
  double normal();

  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::uint64_t s_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Seed for an independent stream: mixes the master seed, a stage name and
/// a counter (e.g. replication index) so each stage is reproducible alone.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stage, std::uint64_t counter = 0);

/// k distinct indices from [0, n), returned in ascending order.
std::vector<std::size_t> sample_without_replacement(Rng& rng, std::size_t n, std::size_t k);

}  // namespace wavecurve
