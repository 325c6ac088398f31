#ifndef FDLINK_RANDOM_HPP
#define FDLINK_RANDOM_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

#include "fdlink/constants.hpp"

namespace fdlink {

namespace detail {

// SplitMix64 step; used to derive well-separated engine seeds from
// (master seed, stream id, index) triples.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

} // namespace detail

/// Reproducible stream of standard normal draws.
///
/// The uniform-to-double mapping and the Box-Muller transform are spelled
/// out here instead of using std::normal_distribution, whose output is
/// implementation-defined; a fixed seed reproduces the same values on any
/// platform with IEEE doubles.
class GaussianStream {
public:
  explicit GaussianStream(std::uint64_t seed)
      : engine_(seed), cached_(0.0), has_cached_(false) {}

  /// Deterministic sub-stream for (master seed, stream id, index), e.g. one
  /// stream per user so channel assembly can be parallelized across users.
  static GaussianStream substream(std::uint64_t master_seed,
                                  std::uint64_t stream_id,
                                  std::uint64_t index) {
    std::uint64_t s = master_seed;
    std::uint64_t a = detail::splitmix64(s);
    s ^= stream_id * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL;
    std::uint64_t b = detail::splitmix64(s);
    s ^= index * 0xda942042e4dd58b5ULL + 0x9e3779b97f4a7c15ULL;
    std::uint64_t c = detail::splitmix64(s);
    return GaussianStream(a ^ (b << 1) ^ (c << 2));
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }

  /// Standard normal N(0, 1).
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    // u1 in (0, 1] so the log is finite.
    double u1 = 1.0 - uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    cached_ = r * std::sin(kTwoPi * u2);
    has_cached_ = true;
    return r * std::cos(kTwoPi * u2);
  }

  /// Circular complex Gaussian with unit variance: (x + jy)/sqrt(2).
  std::complex<double> complex_normal() {
    double x = normal();
    double y = normal();
    return {x * std::numbers::sqrt2 / 2.0, y * std::numbers::sqrt2 / 2.0};
  }

private:
  std::mt19937_64 engine_;
  double cached_;
  bool has_cached_;
};

} // namespace fdlink

#endif
