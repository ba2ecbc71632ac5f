#include <cmath>
#include <limits>

#include <doctest.h>

#include "oracles.hpp"
#include "qcx/matcore.hpp"
#include "qcx/sampling.hpp"

using namespace qcx;

TEST_CASE("minor2 on small matrices") {
  CHECK(minor2(Mat::identity(2), 0, 1, 0, 1) == 1.0);
  CHECK(minor2(Mat{{1, 1}, {0, 1}}, 0, 1, 0, 1) == 1.0);
  CHECK(minor2(Mat{{2, 3}, {4, 6}}, 0, 1, 0, 1) == 0.0);
  CHECK_THROWS_AS(minor2(Mat::identity(2), 0, 2, 0, 1), ArgumentError);
  CHECK_THROWS_AS(minor2(Mat::identity(2), 0, 0, 0, 1), ArgumentError);
}

TEST_CASE("mat rejects non-finite entries and bad sizes") {
  CHECK_THROWS_AS(Mat(1, 2, {1.0, std::numeric_limits<double>::quiet_NaN()}), ArgumentError);
  CHECK_THROWS_AS(Mat(2, 2, {1.0, 2.0, 3.0}), ArgumentError);
}

TEST_CASE("adjugate vector examples") {
  CHECK(adjugate_vector(Mat::identity(3), 2) == Vec{0, 0, 1});
  const double d[] = {2, 3, 5};
  CHECK(adjugate_vector(Mat::diag(d), 0) == Vec{15, 0, 0});
  CHECK_THROWS_AS(adjugate_vector(Mat(2, 3), 0), ArgumentError);
}

TEST_CASE("laplace expansion matches elimination") {
  Rng rng(11);
  for (std::size_t N : {2u, 3u, 4u, 5u}) {
    for (int trial = 0; trial < 200; ++trial) {
      const Mat F = rng.uniform_matrix(N, N);
      const double ref = oracle::lu_det(F);
      const double scale = std::pow(F.frobenius_norm(), static_cast<double>(N));
      CHECK(std::abs(det(F) - ref) <= 1e-12 * scale);
      for (Axis ax : {Axis::Row, Axis::Column}) {
        for (std::size_t j = 0; j < N; ++j) {
          const Vec fj = ax == Axis::Row ? F.row(j) : F.col(j);
          CHECK(std::abs(dot(adjugate_vector(F, j, ax), fj) - ref) <= 1e-12 * scale);
        }
      }
    }
  }
}

TEST_CASE("det basics") {
  for (std::size_t n = 1; n <= 6; ++n) CHECK(det(Mat::identity(n)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(det(Mat{{1, 1}, {0, 1}}) == 1.0);
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const Mat F = rng.uniform_matrix(2, 2);
    const double alt = -dot(F.row(0), rot2(F.row(1)));
    CHECK(std::abs(det(F) - alt) <= 1e-14);
  }
}

TEST_CASE("quarter turns") {
  CHECK(rot2(Vec{1, 0}) == Vec{0, 1});
  CHECK(rot2(Vec{0, 1}) == Vec{-1, 0});
  CHECK(rot_block(Vec{1, 0, 0, 1}) == Vec{0, 1, -1, 0});
  CHECK_THROWS_AS(rot_block(Vec{1, 2, 3}), ArgumentError);
  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    const Vec x{rng.normal(), rng.normal()};
    const Vec rr = rot2(rot2(x));
    CHECK(rr[0] == -x[0]);
    CHECK(rr[1] == -x[1]);
    CHECK(std::abs(norm(rot2(x)) - norm(x)) <= 1e-15 * (1 + norm(x)));
    Vec v(6);
    for (auto& e : v) e = rng.normal();
    const Vec w = rot_block(rot_block(v));
    for (std::size_t k = 0; k < 6; ++k) CHECK(w[k] == -v[k]);
    CHECK(std::abs(norm(rot_block(v)) - norm(v)) <= 1e-15 * (1 + norm(v)));
  }
}

TEST_CASE("rotated pairing gives the block determinant sum") {
  Rng rng(8);
  for (int i = 0; i < 500; ++i) {
    const Mat F = rng.uniform_matrix(2, 4);
    const double lhs = -dot(F.row(0), rot_block(F.row(1)));
    CHECK(std::abs(lhs - oracle::block_dets(F)) <= 1e-14);
    CHECK(std::abs(block_det_sum(F) - oracle::block_dets(F)) <= 1e-14);
  }
}

TEST_CASE("vector product") {
  CHECK(cross3(Vec{1, 0, 0}, Vec{0, 1, 0}) == Vec{0, 0, 1});
  CHECK(cross3(Vec{1, 2, 3}, Vec{1, 2, 3}) == Vec{0, 0, 0});
  Rng rng(9);
  for (int i = 0; i < 500; ++i) {
    const Mat F = rng.uniform_matrix(2, 3);
    const double m12 = F(0, 0) * F(1, 1) - F(0, 1) * F(1, 0);
    const double m13 = F(0, 0) * F(1, 2) - F(0, 2) * F(1, 0);
    const double m23 = F(0, 1) * F(1, 2) - F(0, 2) * F(1, 1);
    CHECK(norm2(cross3(F.row(0), F.row(1))) == doctest::Approx(m12 * m12 + m13 * m13 + m23 * m23).epsilon(1e-13));
  }
}

TEST_CASE("rank one defect") {
  const Vec a{1, -2, 3}, b{4, 0, -1, 2};
  const RankOneReport r = rank_one_defect(Mat::outer(a, b));
  CHECK(r.defect == 0.0);
  CHECK(r.is_rank_le_one);
  CHECK(rank_one_defect(Mat::identity(2)).defect == 0.5);
  CHECK_FALSE(rank_one_defect(Mat::identity(2)).is_rank_le_one);
  CHECK(rank_one_defect(Mat(3, 3)).defect == 0.0);
  CHECK(rank_one_defect(Mat(3, 3)).is_rank_le_one);
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    Vec u(3), v(2);
    for (auto& e : u) e = std::floor(rng.uniform(-9, 9));
    for (auto& e : v) e = std::floor(rng.uniform(-9, 9));
    CHECK(rank_one_defect(Mat::outer(u, v)).defect == 0.0);
  }
}
