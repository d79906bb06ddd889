#ifndef LPSIM_RNG_HPP
#define LPSIM_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace lpsim {

// splitmix64; used to whiten (seed, stream) pairs into engine seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic random stream. One stream per simulated path keeps results
// independent of worker scheduling: stream i always produces the same draws.
//
// All variate transforms are done locally (not via std::*_distribution) so
// the byte-identical reproducibility contract does not depend on the
// standard library's unspecified distribution algorithms.
class RngStream {
public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  static RngStream derive(std::uint64_t master_seed, std::uint64_t stream_id) {
    return RngStream(mix64(master_seed ^ mix64(stream_id)));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0, n). n must be >= 1.
  std::uint64_t uniform_index(std::uint64_t n) {
    const std::uint64_t bound = n == 0 ? 0 : (~std::uint64_t{0} - (~std::uint64_t{0} % n + 1) % n);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x > bound);
    return x % n;
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Standard Gaussian via the Box-Muller transform. Pairs are cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]: keeps log() finite
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * M_PI * u2;
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
  }

  // Log-normal with shape s, location mu and scale lambda:
  // x = mu + lambda * exp(s * z), z ~ N(0,1).
  double lognormal(double s, double mu, double lambda) {
    return mu + lambda * std::exp(s * normal());
  }

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace lpsim

#endif
