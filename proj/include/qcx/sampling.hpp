#pragma once

#include <cstdint>
#include <random>

#include "qcx/matcore.hpp"

namespace qcx {

/// Seeded generator with a portable mapping to doubles, so reports replay across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal by Box–Muller.
  double normal();

  Mat uniform_matrix(std::size_t rows, std::size_t cols, double lo = -1.0, double hi = 1.0);
  Vec unit_vector(std::size_t n);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// i-th point (i ≥ 1) of the Halton sequence in the given prime base.
double radical_inverse(std::uint64_t i, std::uint32_t base);
std::uint32_t nth_prime(std::size_t n);

}  // namespace qcx
