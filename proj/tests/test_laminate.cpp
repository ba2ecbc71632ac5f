#include <cmath>

#include <doctest.h>

#include "oracles.hpp"
#include "qcx/constructor.hpp"
#include "qcx/laminate.hpp"
#include "qcx/sampling.hpp"

using namespace qcx;

namespace {

// Random rank-one split tree of the given depth around F.
Laminate random_tree(const Mat& F, int depth, Rng& rng) {
  if (depth == 0) return Laminate::leaf(F);
  const double t = rng.uniform(0.1, 0.9);
  const Mat D = Mat::outer(rng.unit_vector(F.rows()), rng.unit_vector(F.cols())) * rng.uniform(0.2, 2.0);
  // F = t(F + (1−t)D) + (1−t)(F − tD)
  return Laminate::split(t, random_tree(F + (1 - t) * D, depth - 1, rng), random_tree(F - t * D, depth - 1, rng));
}

}  // namespace

TEST_CASE("barycenter") {
  const Mat A{{1, 2}, {3, 4}}, B{{0, 2}, {3, 0}};
  CHECK(barycenter(Laminate::leaf(A)) == A);
  const Mat m = barycenter(Laminate::split(0.5, Laminate::leaf(A), Laminate::leaf(B)));
  CHECK(m == (A + B) * 0.5);
  const Mat F{{1, 1}, {0, 1}};
  const Mat b = barycenter(decompose_2x2N(F));
  for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(b.entries()[k] - F.entries()[k]) <= 1e-12);
}

TEST_CASE("act") {
  CHECK(act(Laminate::leaf(Mat::identity(2)), Integrand::abs_det(2)) == 1.0);
  // The two leaves of the 2×3 example in the plane: determinants 0 and 2.
  const Laminate nu = Laminate::split(0.5, Laminate::leaf(Mat{{0, 0}, {2, 1}}), Laminate::leaf(Mat{{2, 0}, {0, 1}}));
  CHECK(act(nu, Integrand::abs_det(2)) == 1.0);
  Rng rng(2);
  const Laminate tree = random_tree(rng.uniform_matrix(2, 3), 3, rng);
  CHECK(act(tree, [](const Mat&) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("act is linear in mixtures") {
  Rng rng(3);
  const Integrand g = Integrand::prod_rows(3);
  for (int i = 0; i < 200; ++i) {
    const Laminate L = random_tree(rng.uniform_matrix(2, 3), 2, rng);
    const Laminate R = random_tree(rng.uniform_matrix(2, 3), 1, rng);
    const double t = rng.uniform();
    const double lhs = act(Laminate::split(t, L, R), g);
    CHECK(std::abs(lhs - (t * act(L, g) + (1 - t) * act(R, g))) <= 1e-14 * (1 + std::abs(lhs)));
  }
}

TEST_CASE("quasiaffine integrands commute with exact rank-one laminates") {
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    const Mat F = rng.uniform_matrix(2, 2);
    const Laminate nu = random_tree(F, 3, rng);
    CHECK(std::abs(act(nu, [](const Mat& M) { return det(M); }) - det(barycenter(nu))) <= 1e-10);
    const Mat G = rng.uniform_matrix(2, 6);
    const Laminate mu = random_tree(G, 3, rng);
    CHECK(std::abs(act(mu, [](const Mat& M) { return oracle::block_dets(M); }) - oracle::block_dets(barycenter(mu))) <=
          1e-10);
  }
}

TEST_CASE("validate") {
  Rng rng(5);
  const Mat F = rng.uniform_matrix(2, 3);
  const LaminateReport dirac = validate(Laminate::leaf(F), std::nullopt);
  CHECK(dirac.barycenter_residual == 0.0);
  CHECK(dirac.max_split_defect == 0.0);
  CHECK(dirac.weight_sum_residual == 0.0);
  CHECK(dirac.support_violations == 0);
  CHECK(dirac.passed);

  const Laminate bad = Laminate::split(0.5, Laminate::leaf(Mat::identity(2)), Laminate::leaf(-Mat::identity(2)));
  const LaminateReport r = validate(bad, std::nullopt, 1e-9);
  CHECK(r.max_split_defect > 1e-9);
  CHECK_FALSE(r.passed);

  ValidateOptions vo;
  vo.target = Mat{{1, 0}, {0, 1}};
  const LaminateReport off = validate(Laminate::leaf(Mat{{1, 0}, {0, 2}}), vo);
  CHECK(off.barycenter_residual == doctest::Approx(0.5));
  CHECK_FALSE(off.passed);

  const CoincidenceQuery q{Integrand::prod_rows(2), Integrand::abs_det(2), 1e-9};
  for (int i = 0; i < 100; ++i) {
    Mat G = rng.uniform_matrix(2, 2);
    while (std::abs(det(G)) <= 1e-6) G = rng.uniform_matrix(2, 2);
    CHECK(validate(decompose_2x2N(G), q).support_violations == 0);
  }
}

TEST_CASE("json round trip is bit exact") {
  Rng rng(6);
  const Laminate nu = random_tree(rng.uniform_matrix(3, 3), 3, rng);
  const Laminate back = laminate_from_json(nlohmann::json::parse(to_json(nu).dump()));
  const auto a = nu.atoms(), b = back.atoms();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].weight == b[i].weight);
    CHECK(a[i].matrix == b[i].matrix);
  }
  CHECK(parse_float(hex_float(0.1)) == 0.1);
  CHECK(parse_float(nlohmann::json("0.25")) == 0.25);
  CHECK(mat_from_json(to_json(Mat{{1, 2}, {3, 4}}, FloatFormat::Decimal)) == Mat{{1, 2}, {3, 4}});
}
