#pragma once

#include <cstdint>
#include <random>

namespace entroflow {

/// Seedable, portable random source.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Streams are split per sample index: stream k of seed s is seeded
/// with splitmix64(s ^ splitmix64(k + 1)), so the state drawn for sample k
/// never depends on how many workers ran or in which order. Uniform and
/// normal variates are derived here rather than through <random>
/// distributions, whose algorithms differ between standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via Box-Muller.
  double normal();
  /// Gamma(shape, 1) for shape >= 1 (Marsaglia-Tsang).
  double gamma(double shape);
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

  static std::uint64_t splitmix64(std::uint64_t x);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace entroflow
