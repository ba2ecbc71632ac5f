#include "qcx/envelope_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include <boost/math/tools/minima.hpp>

#include "qcx/sampling.hpp"

namespace qcx {

void OracleConfig::validate() const {
  if (depth < 0) throw ArgumentError("OracleConfig: depth must be ≥ 0");
  if (directions_per_level < 0) throw ArgumentError("OracleConfig: negative direction count");
  if (!(line_halfwidth > 0.0)) throw ArgumentError("OracleConfig: line half-width must be positive");
  if (line_samples < 3 || line_samples % 2 == 0) throw ArgumentError("OracleConfig: line_samples must be odd and ≥ 3");
  if (refine_beam < 0 || refine_rounds < 0) throw ArgumentError("OracleConfig: negative refinement setting");
}

HullPoint convex_envelope_1d(const std::vector<double>& s, const std::vector<double>& v, double query) {
  if (s.size() != v.size() || s.empty()) throw ArgumentError("convex_envelope_1d: sample lists differ or are empty");
  if (!std::is_sorted(s.begin(), s.end())) throw ArgumentError("convex_envelope_1d: abscissae not sorted");
  if (query < s.front() || query > s.back()) throw ArgumentError("convex_envelope_1d: query outside the sample range");

  // Andrew's monotone chain, lower part only.
  std::vector<std::size_t> hull;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!hull.empty() && s[hull.back()] == s[i]) {
      if (v[i] < v[hull.back()]) hull.pop_back();
      else continue;
    }
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2], b = hull.back();
      const double cross = (s[b] - s[a]) * (v[i] - v[a]) - (v[b] - v[a]) * (s[i] - s[a]);
      if (cross <= 0.0) hull.pop_back();
      else break;
    }
    hull.push_back(i);
  }

  for (std::size_t h = 0; h < hull.size(); ++h) {
    const std::size_t i = hull[h];
    if (s[i] == query) return {v[i], i, i, 1.0};
    if (h + 1 < hull.size() && s[i] < query && query < s[hull[h + 1]]) {
      const std::size_t j = hull[h + 1];
      const double w = (s[j] - query) / (s[j] - s[i]);
      return {w * v[i] + (1.0 - w) * v[j], i, j, w};
    }
  }
  throw InvariantViolation("convex_envelope_1d: query not covered by the hull");
}

namespace {

struct Result {
  double value;
  Laminate laminate;
};

class Estimator {
 public:
  Estimator(const Integrand& phi, const OracleConfig& cfg) : phi_(phi), cfg_(cfg) {
    const std::size_t m = phi.rows, n = phi.cols;
    for (const auto& D : cfg.informed_directions) {
      if (D.rows() != m || D.cols() != n) throw ArgumentError("estimate: informed direction has the wrong shape");
      if (D.max_abs() > 0.0 && rank_one_defect(D).defect <= 1e-9) informed_.push_back(D);
    }
    Rng rng(cfg.seed);
    random_.resize(static_cast<std::size_t>(cfg.depth) + 1);
    for (int k = 1; k <= cfg.depth; ++k)
      for (int d = 0; d < cfg.directions_per_level; ++d) {
        const Vec a = rng.unit_vector(m);
        const Vec b = rng.unit_vector(n);
        random_[k].push_back(Mat::outer(a, b));
      }
    const int ns = cfg.line_samples;
    for (int i = 0; i < ns; ++i)
      grid_.push_back(cfg.line_halfwidth * static_cast<double>(2 * i - (ns - 1)) / static_cast<double>(ns - 1));
    // Informed lines also get geometric samples toward 0, where a split with t near 0 or 1 puts a support.
    dense_grid_ = grid_;
    const double h = grid_[1] - grid_[0];
    for (double e = 0.5 * h; e > 1e-9 * h; e *= 0.5) {
      dense_grid_.push_back(e);
      dense_grid_.push_back(-e);
    }
    std::sort(dense_grid_.begin(), dense_grid_.end());
  }

  Result run(const Mat& F, int k, bool root = false) {
    if (k == 0) return {f(F), Laminate::leaf(F)};
    Result best = run(F, k - 1, root);

    struct Line {
      const Mat* D;
      const std::vector<double>* grid;
      std::vector<double> values;
      double hull;
    };
    std::vector<Line> lines;
    const auto scan = [&](const Mat& D, const std::vector<double>& grid) {
      if (exhausted()) return;
      Line L{&D, &grid, {}, 0.0};
      L.values.reserve(grid.size());
      for (double s : grid) L.values.push_back(f(F + s * D));
      L.hull = convex_envelope_1d(grid, L.values, 0.0).value;
      lines.push_back(std::move(L));
    };
    for (const auto& D : informed_) scan(D, dense_grid_);
    for (const auto& D : random_[k]) scan(D, grid_);

    std::vector<std::size_t> order(lines.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return lines[a].hull < lines[b].hull; });
    // Unrefined lines still yield valid candidates when the beam is empty.
    const std::size_t beam = std::min<std::size_t>(order.size(), std::max(cfg_.refine_beam, 1));
    for (std::size_t r = 0; r < beam; ++r) {
      Line& L = lines[order[r]];
      const Mat& D = *L.D;
      const std::vector<double>& grid = *L.grid;
      std::vector<std::optional<Laminate>> refined(grid.size());
      for (int round = 0; k >= 2 && cfg_.refine_beam > 0 && round < cfg_.refine_rounds; ++round) {
        const HullPoint hp = convex_envelope_1d(grid, L.values, 0.0);
        bool changed = false;
        for (std::size_t idx : {hp.left, hp.right}) {
          if (refined[idx] || exhausted()) continue;
          Result sub = run(F + grid[idx] * D, k - 1);
          if (sub.value < L.values[idx]) {
            L.values[idx] = sub.value;
            refined[idx] = std::move(sub.laminate);
            changed = true;
          } else {
            refined[idx] = Laminate::leaf(F + grid[idx] * D);
          }
        }
        if (!changed) break;
      }

      const HullPoint hp = convex_envelope_1d(grid, L.values, 0.0);
      const auto lam_at = [&](std::size_t idx) {
        return refined[idx] ? *refined[idx] : Laminate::leaf(F + grid[idx] * D);
      };
      Result cand{0.0, lam_at(hp.left)};
      if (hp.left == hp.right) {
        cand.value = L.values[hp.left];
      } else {
        cand.value = hp.weight * L.values[hp.left] + (1.0 - hp.weight) * L.values[hp.right];
        cand.laminate = Laminate::split(hp.weight, lam_at(hp.left), lam_at(hp.right));
        if (cfg_.polish && !refined[hp.left] && !refined[hp.right]) polish(F, D, grid, hp, cand);
      }
      if (cand.value < best.value) best = std::move(cand);
    }
    if (root && k == 1 && cfg_.polish_directions && !order.empty()) {
      Result cand = search_direction(F, *lines[order[0]].D);
      if (cand.value < best.value) best = std::move(cand);
    }
    return best;
  }

  std::uint64_t evaluations() const { return evals_; }
  bool partial() const { return partial_; }

 private:
  double f(const Mat& M) {
    ++evals_;
    return eval(phi_, M);
  }

  bool exhausted() {
    if (cfg_.budget != 0 && evals_ >= cfg_.budget) partial_ = true;
    return partial_;
  }

  // Two-point candidate along one unrefined line.
  Result line_candidate(const Mat& F, const Mat& D) {
    std::vector<double> values;
    values.reserve(dense_grid_.size());
    for (double s : dense_grid_) values.push_back(f(F + s * D));
    const HullPoint hp = convex_envelope_1d(dense_grid_, values, 0.0);
    if (hp.left == hp.right) return {values[hp.left], Laminate::leaf(F + dense_grid_[hp.left] * D)};
    Result cand{hp.weight * values[hp.left] + (1.0 - hp.weight) * values[hp.right],
                Laminate::split(hp.weight, Laminate::leaf(F + dense_grid_[hp.left] * D),
                                Laminate::leaf(F + dense_grid_[hp.right] * D))};
    if (cfg_.polish) polish(F, D, dense_grid_, hp, cand);
    return cand;
  }

  // Compass search over the factors of D = a⊗b, each step renormalized to the starting size.
  Result search_direction(const Mat& F, const Mat& D0) {
    std::size_t pi = 0, pj = 0;
    for (std::size_t i = 0; i < D0.rows(); ++i)
      for (std::size_t j = 0; j < D0.cols(); ++j)
        if (std::abs(D0(i, j)) > std::abs(D0(pi, pj))) {
          pi = i;
          pj = j;
        }
    Vec ab = D0.col(pj);
    for (double x : scaled(D0.row(pi), 1.0 / D0(pi, pj))) ab.push_back(x);
    const std::size_t m = D0.rows();
    const double size = D0.frobenius_norm();
    const auto make = [&](const Vec& v) {
      const std::span<const double> a(v.data(), m), b(v.data() + m, v.size() - m);
      Mat D = Mat::outer(a, b);
      const double fn = D.frobenius_norm();
      return fn > 0.0 ? (size / fn) * D : D;
    };

    Result best = line_candidate(F, make(ab));
    double step = 0.25;
    for (int trials = 0; step > 1e-6 && trials < 2000 && !exhausted();) {
      bool improved = false;
      for (std::size_t c = 0; c < ab.size(); ++c) {
        for (double sign : {1.0, -1.0}) {
          Vec trial = ab;
          trial[c] += sign * step * (1.0 + std::abs(ab[c]));
          Result r = line_candidate(F, make(trial));
          ++trials;
          if (r.value < best.value) {
            best = std::move(r);
            ab = std::move(trial);
            improved = true;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    return best;
  }

  // Moves the two supports a < 0 < b off the grid to lower the two-point mixture.
  void polish(const Mat& F, const Mat& D, const std::vector<double>& grid, const HullPoint& hp, Result& cand) {
    double a = grid[hp.left], b = grid[hp.right];
    // Brackets reach the neighbouring samples and never cross 0.
    const double a_lo = hp.left > 0 ? grid[hp.left - 1] : a;
    const double a_hi = std::min(grid[hp.left + 1], 0.5 * a);
    const double b_lo = std::max(grid[hp.right - 1], 0.5 * b);
    const double b_hi = hp.right + 1 < grid.size() ? grid[hp.right + 1] : b;
    double fa = f(F + a * D), fb = f(F + b * D);
    const auto mix = [](double a_, double fa_, double b_, double fb_) {
      const double w = b_ / (b_ - a_);
      return w * fa_ + (1.0 - w) * fb_;
    };
    const int bits = std::numeric_limits<double>::digits / 2 + 4;
    double cur = mix(a, fa, b, fb);
    for (int round = 0; round < 4 && !exhausted(); ++round) {
      const double prev = cur;
      {
        auto [x, v] = boost::math::tools::brent_find_minima(
            [&](double x_) { return mix(x_, f(F + x_ * D), b, fb); }, a_lo, a_hi, bits);
        if (v < cur) {
          a = x;
          fa = f(F + a * D);
          cur = mix(a, fa, b, fb);
        }
      }
      {
        auto [x, v] = boost::math::tools::brent_find_minima(
            [&](double x_) { return mix(a, fa, x_, f(F + x_ * D)); }, b_lo, b_hi, bits);
        if (v < cur) {
          b = x;
          fb = f(F + b * D);
          cur = mix(a, fa, b, fb);
        }
      }
      if (!(cur < prev)) break;
    }
    if (cur < cand.value) {
      const double w = b / (b - a);
      cand.value = w * fa + (1.0 - w) * fb;
      cand.laminate = Laminate::split(w, Laminate::leaf(F + a * D), Laminate::leaf(F + b * D));
    }
  }

  const Integrand& phi_;
  const OracleConfig& cfg_;
  std::vector<Mat> informed_;
  std::vector<std::vector<Mat>> random_;
  std::vector<double> grid_;
  std::vector<double> dense_grid_;
  std::uint64_t evals_ = 0;
  bool partial_ = false;
};

}  // namespace

EnvelopeEstimate estimate(const Integrand& phi, const Mat& F, const OracleConfig& cfg) {
  cfg.validate();
  if (!phi.shape_matches(F)) throw ArgumentError("estimate: shape mismatch for " + phi.name());
  Estimator est(phi, cfg);
  Result r = est.run(F, cfg.depth, true);
  EnvelopeEstimate out{r.value, std::move(r.laminate), cfg.depth, est.evaluations(), est.partial()};
  return out;
}

VerifyReport sweep(const Integrand& phi, const Integrand& phi0, const SamplerSpec& sampler, std::size_t n,
                   const OracleConfig& cfg, const SweepOptions& opts) {
  if (!is_matched_pair(phi, phi0)) throw ArgumentError("sweep: " + phi.name() + " and " + phi0.name() + " are not a matched pair");
  if (sampler.rows != phi.rows || sampler.cols != phi.cols) throw ArgumentError("sweep: sampler shape mismatch");
  cfg.validate();

  VerifyReport rep;
  Rng rng(sampler.seed);
  std::uint64_t rejected = 0;
  double worst = -1.0;
  ordered_json worst_case;
  for (std::size_t i = 0; i < n; ++i) {
    Mat F;
    for (;;) {
      F = rng.uniform_matrix(sampler.rows, sampler.cols, sampler.lo, sampler.hi);
      if (!sampler.accept || sampler.accept(F)) break;
      if (++rejected > 1000000) throw SearchError("sweep: sampler rejects every draw");
    }
    OracleConfig c = cfg;
    if (opts.informer) c.informed_directions = opts.informer(F);
    const EnvelopeEstimate est = estimate(phi, F, c);
    const double v0 = eval(phi0, F);
    const double scale = 1.0 + std::abs(v0);
    const double gap = std::abs(est.value - v0) / scale;
    const double below = std::max(0.0, (v0 - est.value) / scale);
    ValidateOptions vo;
    vo.target = F;
    const LaminateReport lr = validate(est.laminate, vo);

    CaseRecord rec;
    rec.input = to_json(F);
    rec.pass = gap <= opts.gap_tol && below <= opts.lower_tol && lr.passed;
    rec.outcome = est.partial ? "partial" : (rec.pass ? "ok" : "gap_exceeded");
    rec.residuals = {{"gap", gap},
                     {"below_lower_bound", below},
                     {"achievability", std::abs(act(est.laminate, phi) - est.value)},
                     {"barycenter", lr.barycenter_residual},
                     {"split_defect", lr.max_split_defect}};
    rec.artifacts["estimate"] = est.value;
    rec.artifacts["phi0"] = v0;
    rec.artifacts["phi"] = eval(phi, F);
    rec.artifacts["evaluations"] = est.evaluations;
    if (gap > worst) {
      worst = gap;
      worst_case = {{"index", i}, {"laminate", to_json(est.laminate)}};
    }
    rep.add_case(std::move(rec));
  }
  rep.metadata["phi"] = phi.name();
  rep.metadata["phi0"] = phi0.name();
  rep.metadata["rejected_draws"] = rejected;
  if (n > 0) rep.summary_extra["worst_case"] = worst_case;
  return rep;
}

}  // namespace qcx
