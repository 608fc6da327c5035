#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace glocalkd {

/// Deterministic 64-bit random source used by every seeded operation.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. All derived quantities (unit doubles, bounded integers,
/// shuffles, approximate gaussians) are computed here from raw engine
/// words rather than through std::*_distribution, which is
/// implementation-defined; the same seed therefore yields the same bytes
/// on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Unbiased integer in [0, n) by rejection sampling. n must be > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % n;
  }

  int below_int(int n) { return static_cast<int>(below(static_cast<std::uint64_t>(n))); }

  /// Approximately standard-normal draw: a centered Irwin-Hall sum of 8
  /// unit uniforms, scaled to unit variance. Support is bounded,
  /// |z| < sqrt(3*8) ~= 4.9, so a 10-sigma offset can never be produced
  /// by noise alone. Uses only additions, keeping the stream exact.
  double gaussian() {
    double s = 0.0;
    for (int i = 0; i < 8; ++i) s += uniform();
    return (s - 4.0) / 0.816496580927726;  // sqrt(8/12)
  }

  /// Fisher-Yates shuffle driven by below().
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// Well-separated child seed for (base, salt), e.g. per-fold seeds derived
/// from one run seed. SplitMix64 finalizer.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace glocalkd
