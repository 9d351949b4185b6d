#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace admm4dvar {

/// Counter-based standard-normal source.
///
/// Uniforms come from SplitMix64 applied to (seed, counter), so the stream is
/// fully determined by the seed and the number of draws so far. Normals use the
/// Marsaglia polar method; the second variate of each accepted pair is kept and
/// returned by the next draw, which makes drawing 2k values equal to drawing k
/// values twice.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed = 0) : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform() {
    const std::uint64_t bits = splitmix64(seed_ ^ 0x9E3779B97F4A7C15ULL, counter_++);
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    has_spare_ = true;
    return u * factor;
  }

 private:
  static std::uint64_t splitmix64(std::uint64_t key, std::uint64_t counter) {
    std::uint64_t z = key + (counter + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// `count` i.i.d. N(0,1) samples drawn from `stream`.
inline std::vector<double> gaussian_draw(RandomStream& stream, std::size_t count) {
  std::vector<double> out(count);
  for (double& x : out) x = stream.normal();
  return out;
}

}  // namespace admm4dvar
