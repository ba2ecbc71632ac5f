#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "qcx/integrands.hpp"
#include "qcx/laminate.hpp"
#include "qcx/report.hpp"

namespace qcx {

struct OracleConfig {
  int depth = 1;
  int directions_per_level = 64;
  double line_halfwidth = 4.0;
  int line_samples = 129;  // odd, so s = 0 is a sample
  std::uint64_t seed = 1;
  /// Extra directions tried at every level, used as given (not normalized). Only rank-one ones are kept.
  std::vector<Mat> informed_directions;
  /// Directions per node whose hull supports are re-evaluated one level down.
  int refine_beam = 4;
  int refine_rounds = 2;
  /// Brent adjustment of the two hull supports on the last level.
  bool polish = true;
  /// Local search over the factors of the best sampled direction at the query point.
  bool polish_directions = true;
  /// Cap on integrand evaluations per estimate; 0 means unlimited.
  std::uint64_t budget = 0;

  void validate() const;
};

struct EnvelopeEstimate {
  double value = 0.0;
  Laminate laminate;
  int depth_used = 0;
  std::uint64_t evaluations = 0;
  bool partial = false;  // budget ran out, refinement stopped early
};

struct HullPoint {
  double value = 0.0;
  std::size_t left = 0;   // supporting sample indices, left ≤ right
  std::size_t right = 0;
  double weight = 1.0;    // mass on `left`
};

/// Lower convex envelope of sorted samples (s, v) evaluated at `query`.
HullPoint convex_envelope_1d(const std::vector<double>& s, const std::vector<double>& v, double query);

/// Depth-bounded lamination estimate of the rank-one convex envelope of `phi` at F.
EnvelopeEstimate estimate(const Integrand& phi, const Mat& F, const OracleConfig& cfg);

struct SamplerSpec {
  std::size_t rows = 2;
  std::size_t cols = 2;
  double lo = -1.0;
  double hi = 1.0;
  std::uint64_t seed = 1;
  std::function<bool(const Mat&)> accept;  // resample while false
};

struct SweepOptions {
  double gap_tol = 5e-2;    // relative |estimate − φ₀| / (1 + |φ₀|)
  double lower_tol = 1e-9;  // estimate ≥ φ₀ − lower_tol·(1 + |φ₀|)
  /// Directions injected per sample, e.g. from a constructor.
  std::function<std::vector<Mat>(const Mat&)> informer;
};

VerifyReport sweep(const Integrand& phi, const Integrand& phi0, const SamplerSpec& sampler, std::size_t n,
                   const OracleConfig& cfg, const SweepOptions& opts = {});

}  // namespace qcx
