#include <cmath>

#include <doctest.h>

#include "oracles.hpp"
#include "qcx/integrands.hpp"
#include "qcx/sampling.hpp"

using namespace qcx;

TEST_CASE("catalog values") {
  const Mat F{{1, 1}, {0, 1}};
  CHECK(eval(Integrand::prod_rows(2), F) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(eval(Integrand::abs_det(2), F) == 1.0);
  CHECK(eval(Integrand::adj_row_product(3, 2), Mat::identity(3)) == 1.0);
  CHECK(eval(Integrand::cross_norm(), Mat{{1, 0, 0}, {1, 1, 0}}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(eval(Integrand::abs_det(3), F), ArgumentError);
  CHECK_THROWS_AS(eval(Integrand::block_sum(2), Mat(2, 3)), ArgumentError);
}

TEST_CASE("names round trip") {
  for (const Integrand& g :
       {Integrand::prod_rows(2), Integrand::prod_rows(3), Integrand::adj_row_product(3, 2),
        Integrand::adj_row_product(4, 0, Axis::Column), Integrand::triple_product(), Integrand::block_sum(3),
        Integrand::abs_det(3), Integrand::cross_norm(), Integrand::abs_block_det_sum(2),
        Integrand::sum_abs_block_det(2)}) {
    CHECK(parse_integrand(g.name()) == g);
  }
  CHECK(parse_integrand("adjrow:3:3") == Integrand::adj_row_product(3, 2));
  CHECK(parse_integrand("absdet", 3) == Integrand::abs_det(3));
  CHECK_THROWS_AS(parse_integrand("absdet"), ArgumentError);
  CHECK_THROWS_AS(parse_integrand("frobenius"), ArgumentError);
}

TEST_CASE("coincidence set membership") {
  const CoincidenceQuery q{Integrand::prod_rows(2), Integrand::abs_det(2), 1e-9};
  CHECK(in_coincidence_set(q, Mat::identity(2)));
  CHECK_FALSE(in_coincidence_set(q, Mat{{1, 1}, {0, 1}}));
  const CoincidenceQuery q3{Integrand::prod_rows(3), Integrand::cross_norm(), 1e-9};
  CHECK(in_coincidence_set(q3, Mat{{1, 0, 0}, {0, 2, 0}}));
  // Zero first row with an arbitrary second row is in the set.
  CHECK(in_coincidence_set(q, Mat{{0, 0}, {3, -1}}));
}

TEST_CASE("2x2 coincidence: orthogonal rows and the rotated parametrization agree") {
  const CoincidenceQuery q{Integrand::prod_rows(2), Integrand::abs_det(2), 1e-9};
  Rng rng(21);
  for (int i = 0; i < 2000; ++i) {
    const Vec x{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    Mat F(2, 2);
    F.set_row(0, x);
    if (i % 2 == 0) {
      const double alpha = rng.uniform(-3, 3);
      const Vec rx = rot2(x);
      F.set_row(1, Vec{alpha * rx[0], alpha * rx[1]});
    } else {
      F.set_row(1, Vec{rng.uniform(-1, 1), rng.uniform(-1, 1)});
    }
    const bool orth = std::abs(dot(F.row(0), F.row(1))) <= 1e-9 * (1 + norm(x) * norm(F.row(1)));
    // α = (y·Rx)/|x|², then y = αRx exactly when y ⟂ x.
    const Vec rx = rot2(x);
    const double alpha = dot(F.row(1), rx) / norm2(x);
    const Vec resid{F(1, 0) - alpha * rx[0], F(1, 1) - alpha * rx[1]};
    const bool param = norm(resid) <= 1e-9 * (1 + norm(F.row(1)));
    CHECK(in_coincidence_set(q, F) == orth);
    CHECK(orth == param);
  }
}

TEST_CASE("hadamard gap") {
  const Integrand p2 = Integrand::prod_rows(2), d2 = Integrand::abs_det(2);
  CHECK(hadamard_gap(p2, d2, Mat::identity(2)) == 0.0);
  CHECK(hadamard_gap(p2, d2, Mat{{1, 1}, {0, 1}}) == doctest::Approx(std::sqrt(2.0) - 1.0));
  CHECK_THROWS_AS(hadamard_gap(p2, Integrand::cross_norm(), Mat::identity(2)), ArgumentError);
  CHECK_THROWS_AS(hadamard_gap(Integrand::triple_product(), Integrand::abs_det(2), Mat::identity(3)),
                  ArgumentError);

  Rng rng(31);
  int violations = 0;
  for (int i = 0; i < 100000; ++i) {
    const Mat F = rng.uniform_matrix(3, 3);
    const double phi = eval(Integrand::triple_product(), F);
    if (hadamard_gap(Integrand::triple_product(), Integrand::abs_det(3), F) < -1e-12 * (1 + phi)) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("absdet equals the adjugate pairing on every row and column") {
  Rng rng(13);
  for (int i = 0; i < 300; ++i) {
    const std::size_t N = 2 + static_cast<std::size_t>(i % 3);
    const Mat F = rng.uniform_matrix(N, N);
    const double d = eval(Integrand::abs_det(N), F);
    for (std::size_t j = 0; j < N; ++j) {
      CHECK(std::abs(d - std::abs(dot(adjugate_vector(F, j), F.row(j)))) <= 1e-13);
      CHECK(std::abs(d - std::abs(dot(adjugate_vector(F, j, Axis::Column), F.col(j)))) <= 1e-13);
    }
  }
}

TEST_CASE("row homogeneity") {
  Rng rng(17);
  const Integrand one_per_row[] = {Integrand::prod_rows(2), Integrand::prod_rows(3), Integrand::triple_product(),
                                   Integrand::abs_det(3), Integrand::cross_norm()};
  for (const Integrand& g : one_per_row) {
    for (int i = 0; i < 100; ++i) {
      Mat F = rng.uniform_matrix(g.rows, g.cols);
      const double base = eval(g, F);
      const double c = rng.uniform(0.1, 5.0);
      const std::size_t r = static_cast<std::size_t>(i) % g.rows;
      Vec row = F.row(r);
      for (auto& e : row) e *= c;
      F.set_row(r, row);
      CHECK(eval(g, F) == doctest::Approx(c * base).epsilon(1e-13));
    }
  }
  // The block integrands and the adjugate product are homogeneous overall.
  const Integrand overall[] = {Integrand::block_sum(2), Integrand::abs_block_det_sum(3),
                               Integrand::sum_abs_block_det(2)};
  for (const Integrand& g : overall) {
    for (int i = 0; i < 100; ++i) {
      const Mat F = rng.uniform_matrix(g.rows, g.cols);
      const double c = rng.uniform(0.1, 5.0);
      CHECK(eval(g, c * F) == doctest::Approx(c * c * eval(g, F)).epsilon(1e-13));
    }
  }
  for (int i = 0; i < 100; ++i) {
    const Mat F = rng.uniform_matrix(4, 4);
    const double c = rng.uniform(0.1, 5.0);
    const Integrand g = Integrand::adj_row_product(4, 1);
    CHECK(eval(g, c * F) == doctest::Approx(std::pow(c, 4) * eval(g, F)).epsilon(1e-12));
  }
}
