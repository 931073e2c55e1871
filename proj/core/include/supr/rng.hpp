#pragma once

#include <cstdint>
#include <random>

namespace supr {

/// Deterministic random source. All randomness in the library flows through
/// this class so that a (seed, draw order) pair fully determines a run. The
/// uniform mapping is spelled out by hand instead of relying on
/// std::uniform_real_distribution, whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform double in [0, 1) with 53 random mantissa bits.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform double in (lo, hi]; used for draws that must exclude zero.
  double uniform_right_open(double lo, double hi) {
    return hi - (hi - lo) * uniform();
  }

  /// Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) {
    // Rejection-free modulo is biased; n here is tiny relative to 2^64 so
    // use the widening-multiply trick which is exact enough and portable.
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(gen_()) * n) >> 64);
  }

  /// Independent stream for a worker; identical whether runs execute
  /// serially or in a pool (stream index = run index).
  static std::uint64_t derive_stream(std::uint64_t master, std::uint64_t index) {
    // splitmix64 finalizer over master ^ golden-ratio-scaled index.
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace supr
