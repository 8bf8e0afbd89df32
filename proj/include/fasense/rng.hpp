#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace fasense {

/**
 * Seeded random stream with cheap derivation of independent substreams.
 *
 * Substreams are keyed by integer paths (e.g. {AO iteration, slot, particle}),
 * so draws never depend on worker scheduling: the same (seed, path) always
 * yields the same sequence regardless of thread count or evaluation order.
 * mt19937_64 output and our uniform/normal mappings are fully specified,
 * keeping runs byte-reproducible.
 */
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) : key_(key), gen_(splitmix(key)) {}

  /// Independent substream for the given path, derived from this stream's
  /// key (not its consumption state).
  RngStream derive(std::initializer_list<std::uint64_t> path) const {
    std::uint64_t k = key_;
    for (std::uint64_t w : path) k = splitmix(k ^ (0x9e3779b97f4a7c15ULL + splitmix(w)));
    return RngStream(k);
  }

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform draw in [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller (pairs cached).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

  /// Circularly symmetric complex normal, unit variance (E|z|^2 = 1).
  std::complex<double> complex_normal() {
    double re = normal();
    double im = normal();
    return {re * M_SQRT1_2, im * M_SQRT1_2};
  }

 private:
  static std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::uint64_t key_;
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// Fixed tags for top-level substream derivation.
namespace stream_tag {
inline constexpr std::uint64_t kTargets = 1;
inline constexpr std::uint64_t kPsoInit = 2;
inline constexpr std::uint64_t kPsoStep = 3;
inline constexpr std::uint64_t kWaveform = 4;
inline constexpr std::uint64_t kEcho = 5;
inline constexpr std::uint64_t kOracle = 6;
}  // namespace stream_tag

}  // namespace fasense
