#include "qcx/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qcx/laminate.hpp"
#include "qcx/sampling.hpp"

namespace qcx {

GradedPolynomial& GradedPolynomial::add_part(double degree, Evaluator eval, std::string label) {
  if (!(degree > 0.0)) throw ArgumentError("GradedPolynomial: degree must be positive");
  if (!parts_.empty() && degree <= parts_.back().degree)
    throw ArgumentError("GradedPolynomial: degrees must be strictly increasing");
  parts_.push_back({degree, std::move(eval), std::move(label), false});
  return *this;
}

double GradedPolynomial::operator()(const Mat& F) const {
  if (F.rows() != rows_ || F.cols() != cols_) throw ArgumentError("GradedPolynomial: shape mismatch");
  double s = 0.0;
  for (const auto& p : parts_) s += p.eval(F);
  return s;
}

bool GradedPolynomial::check_homogeneity(std::uint64_t seed, int trials, double rel_tol) {
  Rng rng(seed);
  bool all_ok = true;
  for (auto& part : parts_) {
    bool ok = true;
    for (int k = 0; k < trials && ok; ++k) {
      const Mat F = rng.uniform_matrix(rows_, cols_);
      const double c = rng.uniform(0.25, 4.0);
      const double expected = std::pow(c, part.degree) * part.eval(F);
      const double got = part.eval(c * F);
      ok = std::abs(got - expected) <= rel_tol * (1.0 + std::abs(expected));
    }
    part.homogeneity_checked = ok;
    all_ok = all_ok && ok;
  }
  return all_ok;
}

bool GradedPolynomial::homogeneity_checked() const {
  return std::all_of(parts_.begin(), parts_.end(), [](const Part& p) { return p.homogeneity_checked; });
}

namespace {

Vec line_of(const Mat& F, std::size_t j, Axis axis) { return axis == Axis::Row ? F.row(j) : F.col(j); }

void require_adj_shape(const Mat& F, std::size_t j) {
  if (!F.is_square()) throw ArgumentError("P_adj: matrix must be square");
  if (F.rows() < 3) throw ArgumentError("P_adj: N must be at least 3");
  if (j >= F.rows()) throw ArgumentError("P_adj: index out of range");
}

}  // namespace

double P_adj(const Mat& F, double t, double alpha1, double alpha0, std::size_t j, Axis axis) {
  require_adj_shape(F, j);
  const Vec adj = adjugate_vector(F, j, axis);
  const Vec fj = line_of(F, j, axis);
  const double beta = t * alpha1 + (1.0 - t) * alpha0;
  const double gamma = t * alpha0 + (1.0 - t) * alpha1;
  return dot(axpby(1.0, adj, -beta, fj), axpby(gamma, adj, -alpha1 * alpha0, fj));
}

double P_adj_normal_form(const Mat& F, double t, double alpha1, double alpha0, std::size_t j, Axis axis) {
  require_adj_shape(F, j);
  const double beta = t * alpha1 + (1.0 - t) * alpha0;
  const double gamma = t * alpha0 + (1.0 - t) * alpha1;
  const double lead = gamma * norm2(adjugate_vector(F, j, axis));
  return lead - (alpha1 * alpha0 + beta * gamma) * det(F) + alpha1 * alpha0 * beta * norm2(line_of(F, j, axis));
}

GradedPolynomial adjugate_polynomial(std::size_t N, double t, double alpha1, double alpha0, std::size_t j,
                                     Axis axis) {
  if (N < 3) throw ArgumentError("adjugate_polynomial: N must be at least 3");
  if (j >= N) throw ArgumentError("adjugate_polynomial: index out of range");
  const double beta = t * alpha1 + (1.0 - t) * alpha0;
  const double gamma = t * alpha0 + (1.0 - t) * alpha1;
  const double prod = alpha1 * alpha0;
  GradedPolynomial P(N, N);
  P.add_part(2.0, [=](const Mat& F) { return prod * beta * norm2(line_of(F, j, axis)); }, "row-norm");
  P.add_part(static_cast<double>(N), [=](const Mat& F) { return -(prod + beta * gamma) * det(F); }, "det");
  P.add_part(static_cast<double>(2 * N - 2),
             [=](const Mat& F) { return gamma * norm2(adjugate_vector(F, j, axis)); }, "adjugate");
  return P;
}

GradedPolynomial block_quadratic_polynomial(std::size_t blocks, double t, double alpha1, double alpha0) {
  if (blocks < 1) throw ArgumentError("block_quadratic_polynomial: need at least one block");
  const double beta = (1.0 - t) * alpha0 + t * alpha1;
  const double gamma = (1.0 - t) * alpha1 + t * alpha0;
  const double prod = alpha1 * alpha0;
  GradedPolynomial P(2, 2 * blocks);
  P.add_part(2.0,
             [=](const Mat& F) {
               return prod * beta * norm2(F.row_view(0)) + gamma * norm2(F.row_view(1)) -
                      (beta * gamma + prod) * block_det_sum(F);
             },
             "quadratic");
  return P;
}

AlphaPair choose_alphas_adj(const Mat& F, std::size_t j, Axis axis, double det_tol) {
  if (!F.is_square() || j >= F.rows()) throw ArgumentError("choose_alphas_adj: bad shape or index");
  const Vec adj = adjugate_vector(F, j, axis);
  const Vec fj = line_of(F, j, axis);
  const double a2 = norm2(adj);
  const double f2 = norm2(fj);
  const double d = det(F);
  if (!(d > det_tol * std::sqrt(a2 * f2)) || d <= 0.0)
    throw DegenerateError("choose_alphas_adj: determinant is not positive");
  if (f2 <= 0.0) throw InvariantViolation("choose_alphas_adj: zero row with positive determinant");
  const double sum = 4.0 * a2 / d;
  const double product = a2 / f2;
  const double disc = sum * sum - 4.0 * product;
  if (disc < 0.0) throw InvariantViolation("choose_alphas_adj: negative discriminant");
  const double big = 0.5 * (sum + std::sqrt(disc));
  return {big, product / big};
}

ConePredicate full_cone() {
  return [](const Mat&) { return true; };
}

ConePredicate rank_one_cone(double tol) {
  return [tol](const Mat& E) { return rank_one_defect(E, tol).is_rank_le_one; };
}

namespace {

// Rank-one candidate number k (k ≥ 1) from a Halton point mapped through Box–Muller.
Mat halton_rank_one(std::uint64_t k, std::size_t m, std::size_t n) {
  const std::size_t dims = m + n;
  Vec g(dims);
  for (std::size_t d = 0; d < dims; d += 2) {
    double u1 = radical_inverse(k, nth_prime(d));
    const double u2 = radical_inverse(k, nth_prime(d + 1));
    u1 = std::max(u1, 1e-300);
    const double r = std::sqrt(-2.0 * std::log(u1));
    g[d] = r * std::cos(2.0 * std::numbers::pi * u2);
    if (d + 1 < dims) g[d + 1] = r * std::sin(2.0 * std::numbers::pi * u2);
  }
  Vec a(g.begin(), g.begin() + static_cast<std::ptrdiff_t>(m));
  Vec b(g.begin() + static_cast<std::ptrdiff_t>(m), g.end());
  const double na = norm(a), nb = norm(b);
  if (na < 1e-12 || nb < 1e-12) return Mat(m, n);
  return Mat::outer(scaled(a, 1.0 / na), scaled(b, 1.0 / nb));
}

// Smallest t on the geometric grid t_start·2^k ≤ t_max with P(F + sign·t·E) > level, if any.
std::optional<double> growth_scan(const GradedPolynomial& P, const Mat& F, const Mat& E, double sign, double level,
                                  const GrowthSearchOptions& opts) {
  for (double t = opts.t_start; t <= opts.t_max; t *= 2.0) {
    const double v = P(F + (sign * t) * E);
    if (!std::isfinite(v) || v > level) return t;
  }
  return std::nullopt;
}

// Root of g on [lo, hi] with g(lo) ≤ 0 < g(hi), bisected down to adjacent doubles.
double bisect(const std::function<double(double)>& g, double lo, double hi) {
  double glo = g(lo);
  double ghi = g(hi);
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double gm = g(mid);
    if (gm > 0.0 || !std::isfinite(gm)) {
      hi = mid;
      ghi = gm;
    } else {
      lo = mid;
      glo = gm;
    }
  }
  return (std::isfinite(ghi) && std::abs(ghi) < std::abs(glo)) ? hi : lo;
}

double scaled_dist(const Mat& A, const Mat& B) { return (A - B).max_abs() / (1.0 + B.max_abs()); }

}  // namespace

std::vector<GrowthDirection> find_growth_directions(const GradedPolynomial& P, const Mat& F,
                                                    const ConePredicate& cone, double level, int count,
                                                    const GrowthSearchOptions& opts) {
  std::vector<GrowthDirection> found;
  for (int k = 1; k <= opts.max_samples && static_cast<int>(found.size()) < count; ++k) {
    Mat E = halton_rank_one(static_cast<std::uint64_t>(k), F.rows(), F.cols());
    if (E.max_abs() == 0.0 || !cone(E)) continue;
    if (growth_scan(P, F, E, +1.0, level, opts) && growth_scan(P, F, E, -1.0, level, opts))
      found.push_back({std::move(E), k});
  }
  return found;
}

GrowthDirection find_growth_direction(const GradedPolynomial& P, const Mat& F, const ConePredicate& cone,
                                      double level, const GrowthSearchOptions& opts) {
  auto found = find_growth_directions(P, F, cone, level, 1, opts);
  if (found.empty())
    throw SearchError("find_growth_direction: no direction among " + std::to_string(opts.max_samples) +
                      " candidates grows past level " + std::to_string(level) +
                      " on both sides within t_max = " + std::to_string(opts.t_max));
  return std::move(found.front());
}

SegmentCertificate segment_on_level_set(const GradedPolynomial& P, const Mat& F, const Mat& E, double alpha,
                                        const GrowthSearchOptions& opts) {
  if (!F.same_shape(E)) throw ArgumentError("segment_on_level_set: shape mismatch");
  const double p0 = P(F);
  if (p0 > alpha) throw ArgumentError("segment_on_level_set: P(F) exceeds the level");

  const auto up = growth_scan(P, F, E, +1.0, alpha, opts);
  if (!up) throw SearchError("segment_on_level_set: P(F + tE) stays below the level");
  const auto g = [&](double t) { return P(F + t * E) - alpha; };
  const double lo_up = *up > opts.t_start ? 0.5 * *up : 0.0;
  const double t0 = bisect(g, lo_up, *up);

  const auto down = growth_scan(P, F, E, -1.0, alpha, opts);
  if (!down) throw SearchError("segment_on_level_set: P(F − τE) stays below the level");
  const auto h = [&](double tau) { return P(F - tau * E) - alpha; };
  const double lo_down = *down > opts.t_start ? 0.5 * *down : 0.0;
  const double tau0 = bisect(h, lo_down, *down);

  SegmentCertificate cert;
  cert.F = F;
  cert.E = E;
  cert.alpha = alpha;
  cert.B = F + t0 * E;
  cert.C = F - tau0 * E;
  cert.s = tau0 / (t0 + tau0);
  cert.residual_B = std::abs(P(cert.B) - alpha);
  cert.residual_C = std::abs(P(cert.C) - alpha);
  cert.defect = rank_one_defect(cert.B - cert.C).defect;
  return cert;
}

CertificateCheck check_certificate(const GradedPolynomial& P, const SegmentCertificate& cert) {
  CertificateCheck chk;
  chk.identity_residual = scaled_dist(cert.s * cert.B + (1.0 - cert.s) * cert.C, cert.F);
  chk.residual_B = std::abs(P(cert.B) - cert.alpha);
  chk.residual_C = std::abs(P(cert.C) - cert.alpha);
  const Mat diff = cert.B - cert.C;
  const double e2 = norm2(cert.E.entries());
  if (e2 > 0.0) {
    const double coef = dot(diff.entries(), cert.E.entries()) / e2;
    chk.direction_residual = (diff - coef * cert.E).max_abs() / (1.0 + diff.max_abs());
  } else {
    chk.direction_residual = diff.max_abs();
  }
  chk.rank_one_defect = rank_one_defect(diff).defect;
  chk.s_in_unit_interval = cert.s >= 0.0 && cert.s <= 1.0;
  return chk;
}

SublevelReport sublevel_membership_report(const GradedPolynomial& P, const Mat& F, const ConePredicate& cone,
                                          double alpha, const GrowthSearchOptions& opts) {
  SublevelReport rep;
  rep.value = P(F);
  if (std::abs(rep.value - alpha) <= 1e-12 * (1.0 + std::abs(alpha))) {
    rep.level_class = LevelClass::OnLevelSet;
    SegmentCertificate dirac;
    dirac.F = dirac.B = dirac.C = F;
    dirac.E = Mat(F.rows(), F.cols());
    dirac.s = 0.5;
    dirac.alpha = alpha;
    dirac.residual_B = dirac.residual_C = std::abs(rep.value - alpha);
    rep.certificate = dirac;
    return rep;
  }
  if (rep.value > alpha) {
    rep.level_class = LevelClass::AboveLevel;
    return rep;
  }
  rep.level_class = LevelClass::StrictSublevel;
  const auto dirs = find_growth_directions(P, F, cone, alpha, std::max(1, opts.select_among), opts);
  if (dirs.empty()) {
    rep.directions_tried = opts.max_samples;
    rep.failure = "no growth direction among " + std::to_string(opts.max_samples) + " rank-one candidates";
    return rep;
  }
  // Flat directions give long segments whose endpoints carry large rounding in P.
  double best = std::numeric_limits<double>::infinity();
  for (const auto& dir : dirs) {
    SegmentCertificate cert;
    try {
      cert = segment_on_level_set(P, F, dir.E, alpha, opts);
    } catch (const SearchError&) {
      continue;
    }
    if (!(cert.s > 0.0 && cert.s < 1.0)) continue;
    const double score = std::max(cert.residual_B, cert.residual_C);
    if (score < best) {
      best = score;
      rep.certificate = std::move(cert);
      rep.directions_tried = dir.samples_tried;
    }
  }
  if (!rep.certificate) rep.failure = "every accepted direction failed to bracket inside (0,1)";
  return rep;
}

const char* to_string(LevelClass c) {
  switch (c) {
    case LevelClass::OnLevelSet:
      return "on_level_set";
    case LevelClass::StrictSublevel:
      return "strict_sublevel";
    case LevelClass::AboveLevel:
      return "above_level";
  }
  return "unknown";
}

nlohmann::ordered_json to_json(const SegmentCertificate& cert) {
  nlohmann::ordered_json j;
  j["F"] = to_json(cert.F);
  j["B"] = to_json(cert.B);
  j["C"] = to_json(cert.C);
  j["E"] = to_json(cert.E);
  j["s"] = hex_float(cert.s);
  j["alpha"] = hex_float(cert.alpha);
  j["residual_B"] = hex_float(cert.residual_B);
  j["residual_C"] = hex_float(cert.residual_C);
  j["defect"] = hex_float(cert.defect);
  return j;
}

SegmentCertificate certificate_from_json(const nlohmann::json& j) {
  SegmentCertificate c;
  c.F = mat_from_json(j.at("F"));
  c.B = mat_from_json(j.at("B"));
  c.C = mat_from_json(j.at("C"));
  c.E = mat_from_json(j.at("E"));
  c.s = parse_float(j.at("s"));
  c.alpha = parse_float(j.at("alpha"));
  c.residual_B = parse_float(j.at("residual_B"));
  c.residual_C = parse_float(j.at("residual_C"));
  c.defect = parse_float(j.at("defect"));
  return c;
}

}  // namespace qcx
