#pragma once

#include <optional>
#include <vector>

#include "qcx/laminate.hpp"
#include "qcx/levelset.hpp"
#include "qcx/matcore.hpp"

namespace qcx {

/// D t² + a₁ t + a₀ whose roots t give two-point splits F = tF₁ + (1−t)F₀ with leaves (x; αR x).
struct QuadraticInT {
  double a2 = 0.0;
  double a1 = 0.0;
  double a0 = 0.0;
  double value_at_0 = 0.0;
  double value_at_1 = 0.0;
  double discriminant = 0.0;
  std::vector<double> roots;  // ascending; a double root appears once
};

/// Coefficients and real roots for a 2×2N matrix, D being the block determinant sum.
QuadraticInT solve_quadratic_t(const Mat& F, double alpha1, double alpha0);

/// (α₁, α₀) on the hyperbola α₁α₀ = 1 (negated when sign = −1) for which the quadratic has a root in
/// (0,1). s = α₁ + α₀ solves the equality case in closed form and is then raised by `margin`.
AlphaPair feasible_alphas(const Mat& F, int sign, double margin = 1e-6, double tol = 1e-12);

struct TwoPointSolution {
  double t = 0.0;
  double alpha1 = 0.0;
  double alpha0 = 0.0;
  Vec x1;
  Vec x0;
  Mat F1;
  Mat F0;
};

/// Two-point split of a 2×2N matrix off the coincidence set; nullopt when F already has
/// |F⁽¹⁾||F⁽²⁾| = |Σ det Fᵢ|.
std::optional<TwoPointSolution> two_point_solution(const Mat& F, double tol = 1e-12);

/// Dirac at F on the coincidence set, else Split(t, F₁, F₀).
Laminate decompose_2x2N(const Mat& F, double tol = 1e-12);

struct PlanarSplit {
  Vec z;
  double lambda = 0.0;
  Vec xplus;
  Vec xminus;
  Vec yplus;
  Vec yminus;
};

/// x± = x ± z, y± = y ± λz with x±·y± = 0, λ = −sign(x·y).
PlanarSplit orthogonal_split(const Vec& x, const Vec& y);

struct Split2x3 {
  Laminate laminate;
  Mat target;                  // barycenter actually decomposed (F unless perturbed)
  double perturbation = 0.0;   // size of the second-row shift applied to dependent rows
  std::optional<PlanarSplit> planar;
};

Split2x3 decompose_2x3_detailed(const Mat& F);
Laminate decompose_2x3(const Mat& F);

struct LeafCertificate {
  Mat leaf;
  bool trivial = false;    // leaf already has |adj⁽³⁾||F⁽³⁾| = |det|
  bool reflected = false;  // third row negated to make det positive
  AlphaPair alphas{0.0, 0.0};
  double p_value = 0.0;    // P at the (possibly reflected) leaf
  SublevelReport report;
};

struct TripleDecomposition {
  Laminate laminate;
  std::vector<LeafCertificate> certificates;
};

/// Splits rows 1–2 with the 2×3 construction, keeps row 3, then certifies each leaf on the level
/// set P = 0 of the adjugate polynomial along row 3.
TripleDecomposition decompose_triple_3x3(const Mat& F, double tol = 1e-12,
                                         const GrowthSearchOptions& search = {});

struct BlockSumDecomposition {
  Laminate laminate;
  std::vector<double> block_gaps;  // |Fᵢ⁽¹⁾||Fᵢ⁽²⁾| − |det Fᵢ| for blocks kept as Dirac, else 0
};

BlockSumDecomposition decompose_block_sum_detailed(const Mat& F, double tol = 1e-12);
Laminate decompose_block_sum(const Mat& F, double tol = 1e-12);

}  // namespace qcx
