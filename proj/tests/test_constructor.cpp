#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "oracles.hpp"
#include "qcx/constructor.hpp"
#include "qcx/sampling.hpp"

using namespace qcx;

namespace {

struct Coeffs {
  double a2, a1, a0;
};

// Quadratic in t written out from |F⁽¹⁾|², |F⁽²⁾|² and the block determinant sum.
Coeffs literal_coeffs(const Mat& F, double a1, double a0) {
  const double p = oracle::row_norm(F, 0), q = oracle::row_norm(F, 1), D = oracle::block_dets(F);
  const double c = a0 - a1;
  return {D, -(a1 * a0 * p * p - q * q + c * D) / c, (a0 * a0 * a1 * p * p + a1 * q * q - 2 * a0 * a1 * D) / (c * c)};
}

// |a·F⁽¹⁾ + R F⁽²⁾|² with R the blockwise quarter turn.
double endpoint_norm2(const Mat& F, double a) {
  double s = 0.0;
  for (std::size_t b = 0; 2 * b < F.cols(); ++b) {
    const double u = a * F(0, 2 * b) - F(1, 2 * b + 1);
    const double v = a * F(0, 2 * b + 1) + F(1, 2 * b);
    s += u * u + v * v;
  }
  return s;
}

Mat draw_off_z(Rng& rng, std::size_t cols) {
  for (;;) {
    Mat F = rng.uniform_matrix(2, cols);
    if (std::abs(oracle::block_dets(F)) > 1e-6 && oracle::row_norm(F, 0) > 1e-6 && oracle::row_norm(F, 1) > 1e-6)
      return F;
  }
}

}  // namespace

TEST_CASE("quadratic double root at the equality case") {
  const Mat F{{1, 1}, {0, 1}};
  const double a1 = (5 + std::sqrt(21.0)) / 2, a0 = (5 - std::sqrt(21.0)) / 2;
  const QuadraticInT q = solve_quadratic_t(F, a1, a0);
  const Coeffs c = literal_coeffs(F, a1, a0);
  const double vertex = -c.a1 / (2 * c.a2);
  CHECK(std::abs(c.a1 * c.a1 - 4 * c.a2 * c.a0) <= 1e-12 * (c.a1 * c.a1));
  REQUIRE(q.roots.size() == 1);
  CHECK(q.roots[0] == doctest::Approx(0.39089).epsilon(1e-5));
  CHECK(q.roots[0] == doctest::Approx(vertex).epsilon(1e-7));
}

TEST_CASE("quadratic endpoint values") {
  const Mat F{{1, 1}, {0, 1}};
  const QuadraticInT q = solve_quadratic_t(F, 1.0, 2.0);
  CHECK(q.value_at_0 == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(q.value_at_0 == doctest::Approx(1.0 / 1.0 * endpoint_norm2(F, 2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(solve_quadratic_t(F, 1.5, 1.5), ArgumentError);

  Rng rng(41);
  for (int i = 0; i < 500; ++i) {
    const Mat G = rng.uniform_matrix(2, 2 * (1 + static_cast<std::size_t>(i % 3)));
    const double a1 = rng.uniform(-3, 3), a0 = rng.uniform(-3, 3);
    if (std::abs(a1 - a0) < 1e-3) continue;
    const QuadraticInT r = solve_quadratic_t(G, a1, a0);
    const double c2 = (a0 - a1) * (a0 - a1);
    const double v0 = a1 / c2 * endpoint_norm2(G, a0), v1 = a0 / c2 * endpoint_norm2(G, a1);
    CHECK(std::abs(r.value_at_0 - v0) <= 1e-10 * std::max(1.0, std::abs(v0)));
    CHECK(std::abs(r.value_at_1 - v1) <= 1e-10 * std::max(1.0, std::abs(v1)));
    const Coeffs c = literal_coeffs(G, a1, a0);
    CHECK(r.a2 == doctest::Approx(c.a2).epsilon(1e-12));
    for (double t : r.roots) CHECK(std::abs((c.a2 * t + c.a1) * t + c.a0) <= 1e-8 * (1 + std::abs(c.a0) + std::abs(c.a1)));
  }
}

TEST_CASE("feasible alphas") {
  const AlphaPair a = feasible_alphas(Mat{{1, 1}, {0, 1}}, +1);
  CHECK(a.alpha1 * a.alpha0 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(a.alpha1 + a.alpha0 == doctest::Approx(5.0 * (1 + 1e-6)).epsilon(1e-14));
  CHECK_THROWS_AS(feasible_alphas(Mat{{1, 0, 1, 0}, {0, 1, 0, -1}}, +1), DegenerateError);

  Rng rng(43);
  for (int i = 0; i < 1000; ++i) {
    const Mat F = draw_off_z(rng, 2 * (1 + static_cast<std::size_t>(i % 3)));
    const int sign = oracle::block_dets(F) > 0 ? 1 : -1;
    const AlphaPair p = feasible_alphas(F, sign);
    CHECK(p.alpha1 * sign > 0);
    CHECK(p.alpha0 * sign > 0);
    const double n1 = oracle::row_norm(F, 0), n2 = oracle::row_norm(F, 1), D = sign * oracle::block_dets(F);
    const double s = sign * (p.alpha1 + p.alpha0), prod = p.alpha1 * p.alpha0;
    const double lhs = 2 * std::sqrt(prod) * std::sqrt(std::max(0.0, n1 * n1 * n2 * n2 - D * D));
    const double rhs = s * D - prod * n1 * n1 - n2 * n2;
    CHECK(lhs <= rhs + 1e-12 * (1 + std::abs(rhs)));
    // Bracketing: endpoint values carry the sign of D, a root in (0, 1).
    const QuadraticInT q = solve_quadratic_t(F, p.alpha1, p.alpha0);
    CHECK(sign * q.value_at_0 >= 0.0);
    CHECK(sign * q.value_at_1 >= 0.0);
    CHECK(std::any_of(q.roots.begin(), q.roots.end(), [](double t) { return t > 0 && t < 1; }));
  }
}

TEST_CASE("two point construction") {
  CHECK(decompose_2x2N(Mat::identity(2)).is_leaf());
  const Mat F{{1, 1}, {0, 1}};
  const Laminate nu = decompose_2x2N(F);
  REQUIRE(nu.leaf_count() == 2);
  for (const auto& a : nu.atoms()) CHECK(std::abs(dot(a.matrix.row(0), a.matrix.row(1))) <= 1e-12);
  ValidateOptions vo;
  vo.target = F;
  vo.support = CoincidenceQuery{Integrand::prod_rows(2), Integrand::abs_det(2), 1e-9};
  CHECK(validate(nu, vo).passed);
  CHECK(act(nu, Integrand::prod_rows(2)) == doctest::Approx(1.0).epsilon(1e-12));

  const Mat G{{1, 1, 0, 0}, {0, 1, 0, 1}};
  CHECK(act(decompose_2x2N(G), Integrand::prod_rows(4)) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(decompose_2x2N(Mat{{1, 0, 1, 0}, {0, 1, 0, -1}}), DegenerateError);
}

TEST_CASE("two point construction invariants") {
  Rng rng(47);
  for (int i = 0; i < 600; ++i) {
    const std::size_t cols = 2 * (1 + static_cast<std::size_t>(i % 3));
    const Mat F = draw_off_z(rng, cols);
    const auto sol = two_point_solution(F);
    REQUIRE(sol.has_value());
    CHECK(sol->t > 0);
    CHECK(sol->t < 1);
    CHECK(sol->alpha1 * sol->alpha0 > 0);
    const Mat back = sol->t * sol->F1 + (1 - sol->t) * sol->F0;
    CHECK((back - F).max_abs() <= 1e-10 * (1 + F.max_abs()));
    for (const auto& [leaf, alpha] : {std::pair{sol->F1, sol->alpha1}, std::pair{sol->F0, sol->alpha0}}) {
      const Vec r = rot_block(leaf.row(0));
      for (std::size_t k = 0; k < cols; ++k) CHECK(std::abs(leaf(1, k) - alpha * r[k]) <= 1e-10 * (1 + leaf.max_abs()));
    }
    const double D = oracle::block_dets(F);
    const double phi = act(decompose_2x2N(F), Integrand::prod_rows(cols));
    CHECK(std::abs(phi - std::abs(D)) <= 1e-9 * std::abs(D));
    if (cols == 2) CHECK(rank_one_defect(sol->F1 - sol->F0).defect <= 1e-9);
    if (D > 0) {
      CHECK(oracle::block_dets(sol->F1) >= -1e-12);
      CHECK(oracle::block_dets(sol->F0) >= -1e-12);
    }
  }
}

TEST_CASE("orthogonal split example") {
  const PlanarSplit s = orthogonal_split(Vec{1, 0}, Vec{1, 1});
  CHECK(s.lambda == -1.0);
  CHECK(s.z[0] == doctest::Approx(-1.0));
  CHECK(std::abs(s.z[1]) <= 1e-15);
  CHECK(s.xplus[0] == doctest::Approx(0.0));
  CHECK(s.yplus[0] == doctest::Approx(2.0));
  CHECK(s.yplus[1] == doctest::Approx(1.0));
  CHECK(s.xminus[0] == doctest::Approx(2.0));
  CHECK(s.yminus[1] == doctest::Approx(1.0));
  CHECK_THROWS_AS(orthogonal_split(Vec{1, 0}, Vec{0, 1}), ArgumentError);
  CHECK_THROWS_AS(orthogonal_split(Vec{1, 1}, Vec{2, 2}), DegenerateError);
}

TEST_CASE("orthogonal split fuzz") {
  Rng rng(53);
  for (int i = 0; i < 10000; ++i) {
    const Vec x{rng.uniform(-1, 1), rng.uniform(-1, 1)}, y{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    if (std::abs(x[0] * y[1] - x[1] * y[0]) < 1e-6 || std::abs(dot(x, y)) < 1e-6) continue;
    const PlanarSplit s = orthogonal_split(x, y);
    const double sc = 1 + norm2(x) + norm2(y);
    CHECK(std::abs(dot(s.xplus, s.yplus)) <= 1e-10 * sc);
    CHECK(std::abs(dot(s.xminus, s.yminus)) <= 1e-10 * sc);
    for (int k = 0; k < 2; ++k) {
      CHECK(std::abs(s.xplus[k] + s.xminus[k] - 2 * x[k]) <= 1e-12 * sc);
      CHECK(std::abs(s.yplus[k] + s.yminus[k] - 2 * y[k]) <= 1e-12 * sc);
    }
    const Vec dx{s.xplus[0] - s.xminus[0], s.xplus[1] - s.xminus[1]};
    const Vec dy{s.yplus[0] - s.yminus[0], s.yplus[1] - s.yminus[1]};
    CHECK(std::abs(dx[0] * s.z[1] - dx[1] * s.z[0]) <= 1e-10 * sc);
    CHECK(std::abs(dy[0] * s.z[1] - dy[1] * s.z[0]) <= 1e-10 * sc);
  }
}

TEST_CASE("2x3 construction") {
  CHECK(decompose_2x3(Mat{{1, 0, 0}, {0, 1, 0}}).is_leaf());
  const Laminate a = decompose_2x3(Mat{{1, 0, 0}, {1, 1, 0}});
  CHECK(a.leaf_count() == 2);
  CHECK(a.weight() == 0.5);
  CHECK(act(a, Integrand::prod_rows(3)) == doctest::Approx(1.0).epsilon(1e-9));
  const Laminate b = decompose_2x3(Mat{{1, 1, 0}, {0, 1, 1}});
  CHECK(act(b, Integrand::prod_rows(3)) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-9));

  const Split2x3 dep = decompose_2x3_detailed(Mat{{1, 2, 3}, {2, 4, 6}});
  CHECK(dep.perturbation > 0);
  CHECK(validate(dep.laminate, ValidateOptions{std::nullopt, dep.target, SplitCone::RankOne, 1e-9}).passed);

  Rng rng(59);
  const CoincidenceQuery q{Integrand::prod_rows(3), Integrand::cross_norm(), 1e-9};
  for (int i = 0; i < 1000; ++i) {
    const Mat F = rng.uniform_matrix(2, 3);
    const Vec c = cross3(F.row(0), F.row(1));
    if (norm(c) <= 1e-6) continue;
    const Laminate nu = decompose_2x3(F);
    const LaminateReport r = validate(nu, ValidateOptions{q, F, SplitCone::RankOne, 1e-9});
    CHECK(r.barycenter_residual <= 1e-10);
    CHECK(r.support_violations == 0);
    CHECK(std::abs(act(nu, Integrand::prod_rows(3)) - oracle::vnorm(c)) <= 1e-9 * oracle::vnorm(c));
  }
}

TEST_CASE("triple product construction") {
  const double d[] = {1, 2, 3};
  const TripleDecomposition dirac = decompose_triple_3x3(Mat::diag(d));
  CHECK(dirac.laminate.is_leaf());
  REQUIRE(dirac.certificates.size() == 1);
  CHECK(dirac.certificates[0].trivial);

  const TripleDecomposition td = decompose_triple_3x3(Mat{{1, 1, 0}, {0, 1, 0}, {0, 0, 1}});
  CHECK(td.laminate.leaf_count() == 2);
  for (const auto& lc : td.certificates) CHECK(lc.p_value <= 0.0);
  CHECK(act(td.laminate, Integrand::adj_row_product(3, 2)) >= 1.0 - 1e-12);
  CHECK_THROWS_AS(decompose_triple_3x3(Mat{{1, 0, 0}, {0, 1, 0}, {1, 1, 0}}), DegenerateError);
}

TEST_CASE("block sum construction") {
  CHECK(decompose_block_sum(Mat{{1, 0, 2, 0}, {0, 1, 0, 3}}).is_leaf());
  const Laminate nu = decompose_block_sum(Mat{{1, 1, 1, 0}, {0, 1, 0, 1}});
  CHECK(nu.leaf_count() == 2);
  CHECK(act(nu, Integrand::block_sum(2)) == doctest::Approx(2.0).epsilon(1e-9));

  Rng rng(61);
  for (int i = 0; i < 200; ++i) {
    Mat F = rng.uniform_matrix(2, 6);
    double target = 0.0;
    for (std::size_t b = 0; b < 3; ++b) target += std::abs(oracle::block_dets(F.col_block(2 * b, 2)));
    const Laminate L = decompose_block_sum(F);
    CHECK(std::abs(act(L, Integrand::block_sum(3)) - target) <= 1e-9 * (1 + target));
    CHECK(validate(L, ValidateOptions{std::nullopt, F, SplitCone::RankOne, 1e-9}).passed);
  }
}
