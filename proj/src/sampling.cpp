#include "qcx/sampling.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace qcx {

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double th = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(th);
  has_spare_ = true;
  return r * std::cos(th);
}

Mat Rng::uniform_matrix(std::size_t rows, std::size_t cols, double lo, double hi) {
  Mat M(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) M(i, j) = uniform(lo, hi);
  return M;
}

Vec Rng::unit_vector(std::size_t n) {
  Vec v(n);
  double s = 0.0;
  do {
    for (double& x : v) x = normal();
    s = norm(v);
  } while (s < 1e-12);
  for (double& x : v) x /= s;
  return v;
}

double radical_inverse(std::uint64_t i, std::uint32_t base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

std::uint32_t nth_prime(std::size_t n) {
  static constexpr std::array<std::uint32_t, 32> kPrimes = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,  31,
                                                            37, 41, 43, 47, 53, 59, 61, 67, 71, 73,  79,
                                                            83, 89, 97, 101, 103, 107, 109, 113, 127, 131};
  if (n >= kPrimes.size()) throw ArgumentError("nth_prime: dimension too large for the Halton table");
  return kPrimes[n];
}

}  // namespace qcx
