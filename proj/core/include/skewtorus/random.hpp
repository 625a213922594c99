#pragma once

#include <cstdint>
#include <random>

namespace skewtorus {

/// Seeded random stream. Bits come from std::mt19937_64; the conversion to
/// doubles is done here so streams are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream for worker `index` derived from a master seed.
  static Rng substream(std::uint64_t master_seed, std::uint64_t index);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on (0, 1).
  double uniform_open();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal (Marsaglia polar method).
  double normal();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0;
};

/// splitmix64 finaliser; used to derive sub-seeds.
std::uint64_t mix_seed(std::uint64_t x);

}  // namespace skewtorus
