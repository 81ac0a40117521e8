#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

namespace grwsim {

/// Seeded random stream used everywhere a trial needs randomness.
///
/// The engine is mt19937_64 but all variates are derived from raw 64-bit
/// draws by hand (not std:: distributions, whose output is
/// implementation-defined), so a (seed, identifier) pair reproduces a run
/// on any platform. The identifier is recorded in every result manifest.
class Rng {
 public:
  static constexpr const char* kIdentifier = "mt19937_64";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream for one Monte Carlo trial. The derivation mixes
  /// (base_seed, trial_index) and does not depend on any engine state, so
  /// trials may run in any order or on any worker.
  static Rng for_trial(std::uint64_t base_seed, std::uint64_t trial_index) {
    return Rng(splitmix64(base_seed + 0x9E3779B97F4A7C15ull * (trial_index + 1)));
  }

  static std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t trial_index) {
    return splitmix64(base_seed + 0x9E3779B97F4A7C15ull * (trial_index + 1));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Exponential waiting time with the given rate.
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

  /// Standard normal via Box-Muller (two uniforms per call, no caching,
  /// so the draw count per call site is fixed).
  double normal() {
    double u1 = uniform();
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793 * u2);
  }

  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace grwsim
