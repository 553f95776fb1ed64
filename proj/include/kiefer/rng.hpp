#ifndef KIEFER_RNG_HPP
#define KIEFER_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace kiefer {

// Deterministic random source. The engine (mt19937_64) is fully specified by
// the standard and all value transforms are spelled out here, so a given seed
// produces the same stream on every platform. std::*_distribution is avoided
// on purpose: its output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform double in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [lo, hi], inclusive. Modulo bias is irrelevant for
  // instance generation and keeps the stream consumption fixed.
  long long uniform_int(long long lo, long long hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<long long>(next_u64() % span);
  }

  // Standard normal via Box-Muller; consumes exactly two uniforms per call.
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace kiefer

#endif  // KIEFER_RNG_HPP
