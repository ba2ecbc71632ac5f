#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcx/matcore.hpp"

namespace qcx {

/// Sum of homogeneous parts P = Σ Pᵢ with strictly increasing degrees dᵢ.
class GradedPolynomial {
 public:
  using Evaluator = std::function<double(const Mat&)>;

  struct Part {
    double degree;
    Evaluator eval;
    std::string label;
    bool homogeneity_checked = false;
  };

  GradedPolynomial(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}

  /// Appends a part; its degree must exceed every degree already present.
  GradedPolynomial& add_part(double degree, Evaluator eval, std::string label = {});

  double operator()(const Mat& F) const;
  double part_value(std::size_t i, const Mat& F) const { return parts_.at(i).eval(F); }

  const std::vector<Part>& parts() const { return parts_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  /// Checks Pᵢ(cF) = c^{dᵢ} Pᵢ(F) on seeded random (c, F). Marks parts that pass; returns
  /// true when all do.
  bool check_homogeneity(std::uint64_t seed = 7, int trials = 16, double rel_tol = 1e-10);
  bool homogeneity_checked() const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Part> parts_;
};

/// (adj⁽ʲ⁾F − (tα₁+(1−t)α₀)F⁽ʲ⁾)·((tα₀+(1−t)α₁)adj⁽ʲ⁾F − α₁α₀F⁽ʲ⁾), N ≥ 3.
double P_adj(const Mat& F, double t, double alpha1, double alpha0, std::size_t j, Axis axis = Axis::Row);

/// Same polynomial through the expanded form
/// (tα₀+(1−t)α₁)|adj⁽ʲ⁾F|² − (α₁α₀ + (tα₁+(1−t)α₀)(tα₀+(1−t)α₁)) det F + α₁α₀(tα₁+(1−t)α₀)|F⁽ʲ⁾|².
double P_adj_normal_form(const Mat& F, double t, double alpha1, double alpha0, std::size_t j,
                         Axis axis = Axis::Row);

/// P_adj as a graded polynomial with parts of degree 2, N and 2N − 2.
GradedPolynomial adjugate_polynomial(std::size_t N, double t, double alpha1, double alpha0, std::size_t j,
                                     Axis axis = Axis::Row);

/// Quadratic form on 2×2N whose zero set collects the two-point splits with parameters
/// (t, α₁, α₀): with β = (1−t)α₀+tα₁, γ = (1−t)α₁+tα₀ and D = Σ det Fᵢ,
/// P₂(F) = α₁α₀β|F⁽¹⁾|² + γ|F⁽²⁾|² − (βγ + α₁α₀) D.
GradedPolynomial block_quadratic_polynomial(std::size_t blocks, double t, double alpha1, double alpha0);

struct AlphaPair {
  double alpha1;
  double alpha0;
};

/// Roots of α² − 4(|adj⁽ʲ⁾F|²/det F) α + |adj⁽ʲ⁾F|²/|F⁽ʲ⁾|², larger root first.
AlphaPair choose_alphas_adj(const Mat& F, std::size_t j, Axis axis = Axis::Row, double det_tol = 1e-12);

using ConePredicate = std::function<bool(const Mat&)>;

ConePredicate full_cone();
ConePredicate rank_one_cone(double tol = 1e-9);

struct GrowthSearchOptions {
  double t_max = 1e6;
  double t_start = 1e-3;
  int max_samples = 4096;
  int select_among = 16;  // sublevel reports keep the best of this many accepted directions
};

struct GrowthDirection {
  Mat E;
  int samples_tried = 0;
};

/// Scans deterministic rank-one candidates a⊗b (Halton points, |a| = |b| = 1) admitted by the cone
/// and returns the first E for which P(F + tE) and P(F − τE) both exceed `level` for some
/// t, τ ≤ t_max. Throws SearchError with diagnostics on exhaustion.
GrowthDirection find_growth_direction(const GradedPolynomial& P, const Mat& F, const ConePredicate& cone,
                                      double level, const GrowthSearchOptions& opts = {});

/// Up to `count` accepted directions in scan order; empty when none is found.
std::vector<GrowthDirection> find_growth_directions(const GradedPolynomial& P, const Mat& F,
                                                    const ConePredicate& cone, double level, int count,
                                                    const GrowthSearchOptions& opts = {});

/// F = s·B + (1 − s)·C with B − C parallel to E and P(B) = P(C) = α.
struct SegmentCertificate {
  Mat F;
  Mat B;
  Mat C;
  Mat E;
  double s = 0.0;
  double alpha = 0.0;
  double residual_B = 0.0;
  double residual_C = 0.0;
  double defect = 0.0;  // rank-one defect of B − C
};

SegmentCertificate segment_on_level_set(const GradedPolynomial& P, const Mat& F, const Mat& E, double alpha,
                                        const GrowthSearchOptions& opts = {});

struct CertificateCheck {
  double identity_residual = 0.0;  // max|sB + (1−s)C − F| / (1 + max|F|)
  double residual_B = 0.0;
  double residual_C = 0.0;
  double direction_residual = 0.0;  // distance of B − C from span(E), scaled
  double rank_one_defect = 0.0;
  bool s_in_unit_interval = true;
};

/// Recomputes every certificate quantity from scratch.
CertificateCheck check_certificate(const GradedPolynomial& P, const SegmentCertificate& cert);

enum class LevelClass { OnLevelSet, StrictSublevel, AboveLevel };

struct SublevelReport {
  LevelClass level_class = LevelClass::AboveLevel;
  double value = 0.0;
  std::optional<SegmentCertificate> certificate;
  int directions_tried = 0;
  std::string failure;  // non-empty when a strict sublevel point could not be certified
};

SublevelReport sublevel_membership_report(const GradedPolynomial& P, const Mat& F, const ConePredicate& cone,
                                          double alpha, const GrowthSearchOptions& opts = {});

const char* to_string(LevelClass c);
nlohmann::ordered_json to_json(const SegmentCertificate& cert);
SegmentCertificate certificate_from_json(const nlohmann::json& j);

}  // namespace qcx
