#include "qcx/constructor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace qcx {

namespace {

struct RowPair {
  Vec p;
  Vec q;
};

RowPair rows_of(const Mat& F) {
  if (F.rows() != 2 || F.cols() < 2 || F.cols() % 2 != 0)
    throw ArgumentError("expected a 2×2N matrix");
  return {F.row(0), F.row(1)};
}

Mat with_rows(const Vec& p, const Vec& q) { return Mat::from_rows({p, q}); }

bool orthogonal_rows_2x2N(const Mat& F) {
  const std::size_t K = F.cols();
  const Integrand phi = Integrand::prod_rows(K);
  const Integrand phi0 = K == 2 ? Integrand::abs_det(2) : Integrand::abs_block_det_sum(K / 2);
  return in_coincidence_set({phi, phi0}, F);
}

}  // namespace

QuadraticInT solve_quadratic_t(const Mat& F, double alpha1, double alpha0) {
  const auto [p, q] = rows_of(F);
  if (alpha1 == alpha0) throw ArgumentError("solve_quadratic_t: alpha1 equals alpha0");
  const double c = alpha0 - alpha1;
  const double D = block_det_sum(F);
  const double pp = norm2(p), qq = norm2(q);

  QuadraticInT Q;
  Q.a2 = D;
  Q.a1 = -(alpha1 * alpha0 * pp - qq + c * D) / c;
  Q.a0 = (alpha0 * alpha0 * alpha1 * pp + alpha1 * qq - 2.0 * alpha0 * alpha1 * D) / (c * c);
  Q.value_at_0 = Q.a0;
  Q.value_at_1 = Q.a2 + Q.a1 + Q.a0;
  Q.discriminant = Q.a1 * Q.a1 - 4.0 * Q.a2 * Q.a0;

  if (Q.a2 == 0.0) {
    if (Q.a1 != 0.0) Q.roots.push_back(-Q.a0 / Q.a1);
    return Q;
  }
  const double scale = Q.a1 * Q.a1 + std::abs(4.0 * Q.a2 * Q.a0);
  if (Q.discriminant < 0.0) {
    if (Q.discriminant >= -1e-12 * scale) Q.roots.push_back(-Q.a1 / (2.0 * Q.a2));
    return Q;
  }
  if (Q.discriminant == 0.0) {
    Q.roots.push_back(-Q.a1 / (2.0 * Q.a2));
    return Q;
  }
  // Cancellation-free pair.
  const double sq = std::sqrt(Q.discriminant);
  const double k = -0.5 * (Q.a1 + std::copysign(sq, Q.a1));
  double r1 = k / Q.a2;
  double r2 = k != 0.0 ? Q.a0 / k : -r1;
  if (r1 > r2) std::swap(r1, r2);
  Q.roots = {r1, r2};
  return Q;
}

AlphaPair feasible_alphas(const Mat& F, int sign, double margin, double tol) {
  if (sign != 1 && sign != -1) throw ArgumentError("feasible_alphas: sign must be ±1");
  auto [p, q] = rows_of(F);
  if (sign < 0) q = scaled(q, -1.0);
  const double D = block_det_sum(with_rows(p, q));
  const double pp = norm2(p), qq = norm2(q);
  if (!(D > tol * std::sqrt(pp * qq)) || D <= 0.0)
    throw DegenerateError("feasible_alphas: block determinant sum of the requested sign is not positive");
  const double g = std::max(0.0, pp * qq - D * D);
  const double s_eq = (pp + qq + 2.0 * std::sqrt(g)) / D;
  const double s = s_eq * (1.0 + margin);
  const double big = 0.5 * (s + std::sqrt(std::max(0.0, s * s - 4.0)));
  const double small = 1.0 / big;
  return sign > 0 ? AlphaPair{big, small} : AlphaPair{-big, -small};
}

std::optional<TwoPointSolution> two_point_solution(const Mat& F, double tol) {
  auto [p, q] = rows_of(F);
  if (orthogonal_rows_2x2N(F)) return std::nullopt;
  const double D0 = block_det_sum(F);
  if (!(std::abs(D0) > tol * std::sqrt(norm2(p) * norm2(q))))
    throw DegenerateError("two_point_solution: block determinant sum vanishes off the coincidence set");

  // Negative sum: flip the second row, solve with positive α, flip the leaves back.
  const int sign = D0 > 0.0 ? 1 : -1;
  if (sign < 0) q = scaled(q, -1.0);
  const Mat G = with_rows(p, q);
  const AlphaPair al = feasible_alphas(G, 1);
  const double a1 = al.alpha1, a0 = al.alpha0;
  const double c = a0 - a1;

  const QuadraticInT Q = solve_quadratic_t(G, a1, a0);
  double t = -1.0;
  for (double r : Q.roots)
    if (r > 0.0 && r < 1.0 && (t < 0.0 || std::abs(r - 0.5) < std::abs(t - 0.5))) t = r;
  if (t < 0.0) throw InvariantViolation("two_point_solution: no root in (0,1) at feasible alphas");

  const Vec Rq = rot_block(q);
  const Vec a = axpby(a0, p, 1.0, Rq);
  const Vec b = axpby(a1, p, 1.0, Rq);

  // Newton on the factored form ((1−t)a + tb)·(α₁(1−t)a + α₀tb).
  const Vec da = axpby(1.0, b, -1.0, a);
  const Vec dv = axpby(a0, b, -a1, a);
  const auto f = [&](double s) { return dot(axpby(1.0, a, s, da), axpby(a1, a, s, dv)); };
  double fv = f(t);
  for (int it = 0; it < 4 && fv != 0.0; ++it) {
    const Vec u = axpby(1.0, a, t, da);
    const Vec v = axpby(a1, a, t, dv);
    const double fp = dot(da, v) + dot(u, dv);
    if (fp == 0.0) break;
    const double tn = t - fv / fp;
    if (!(tn > 0.0 && tn < 1.0)) break;
    const double fn = f(tn);
    if (!(std::abs(fn) < std::abs(fv))) break;
    t = tn;
    fv = fn;
  }

  TwoPointSolution sol;
  sol.t = t;
  sol.x1 = scaled(a, 1.0 / (t * c));
  sol.x0 = scaled(b, -1.0 / ((1.0 - t) * c));
  Vec y1 = scaled(rot_block(sol.x1), a1);
  Vec y0 = scaled(rot_block(sol.x0), a0);
  if (sign < 0) {
    y1 = scaled(y1, -1.0);
    y0 = scaled(y0, -1.0);
  }
  sol.alpha1 = sign * a1;
  sol.alpha0 = sign * a0;
  sol.F1 = with_rows(sol.x1, y1);
  sol.F0 = with_rows(sol.x0, y0);
  return sol;
}

Laminate decompose_2x2N(const Mat& F, double tol) {
  const auto sol = two_point_solution(F, tol);
  if (!sol) return Laminate::leaf(F);
  return Laminate::split(sol->t, Laminate::leaf(sol->F1), Laminate::leaf(sol->F0));
}

PlanarSplit orthogonal_split(const Vec& x, const Vec& y) {
  if (x.size() != 2 || y.size() != 2) throw ArgumentError("orthogonal_split: expected 2-vectors");
  const double nx = norm(x), ny = norm(y);
  const double d = dot(x, y);
  const double cr = x[0] * y[1] - x[1] * y[0];
  if (std::abs(cr) <= 1e-14 * nx * ny) throw DegenerateError("orthogonal_split: vectors are dependent");
  if (std::abs(d) <= 1e-15 * nx * ny) throw ArgumentError("orthogonal_split: vectors are already orthogonal");

  const double lambda = d > 0.0 ? -1.0 : 1.0;
  const Vec w = axpby(1.0, x, lambda, y);
  const Vec dir = scaled(rot2(w), std::sqrt(std::abs(d)) / norm(w));

  const auto build = [&](const Vec& z) {
    PlanarSplit s;
    s.z = z;
    s.lambda = lambda;
    s.xplus = axpby(1.0, x, 1.0, z);
    s.xminus = axpby(1.0, x, -1.0, z);
    s.yplus = axpby(1.0, y, lambda, z);
    s.yminus = axpby(1.0, y, -lambda, z);
    return s;
  };
  const auto shortest = [](const PlanarSplit& s) {
    return std::min({norm(s.xplus), norm(s.xminus), norm(s.yplus), norm(s.yminus)});
  };
  PlanarSplit A = build(dir);
  PlanarSplit B = build(scaled(dir, -1.0));
  const double ma = shortest(A), mb = shortest(B);
  const double tie = 1e-12 * (1.0 + std::max(ma, mb));
  if (std::abs(ma - mb) > tie) return ma > mb ? A : B;
  return std::lexicographical_compare(B.z.begin(), B.z.end(), A.z.begin(), A.z.end()) ? B : A;
}

Split2x3 decompose_2x3_detailed(const Mat& F) {
  if (F.rows() != 2 || F.cols() != 3) throw ArgumentError("decompose_2x3: expected a 2×3 matrix");
  Split2x3 out{Laminate::leaf(F), F, 0.0, std::nullopt};
  if (in_coincidence_set({Integrand::prod_rows(3), Integrand::cross_norm()}, F)) return out;

  Vec p = F.row(0), q = F.row(1);
  if (norm(cross3(p, q)) <= 1e-12 * norm(p) * norm(q)) {
    // Dependent rows: shift the second row off the line of the first.
    std::size_t k = 0;
    for (std::size_t i = 1; i < 3; ++i)
      if (std::abs(p[i]) < std::abs(p[k])) k = i;
    Vec ek(3, 0.0);
    ek[k] = 1.0;
    Vec u = cross3(p, ek);
    u = scaled(u, 1.0 / norm(u));
    out.perturbation = 1e-8 * F.frobenius_norm();
    q = axpby(1.0, q, out.perturbation, u);
    out.target = with_rows(p, q);
    if (in_coincidence_set({Integrand::prod_rows(3), Integrand::cross_norm()}, out.target)) {
      out.laminate = Laminate::leaf(out.target);
      return out;
    }
  }

  // Equal row norms keep both leaves on the same side of the determinant.
  const double mu = std::sqrt(norm(q) / norm(p));
  const Vec ps = scaled(p, mu), qs = scaled(q, 1.0 / mu);
  const double np = norm(ps);
  const Vec e1 = scaled(ps, 1.0 / np);
  const double q1 = dot(qs, e1);
  Vec e2 = axpby(1.0, qs, -q1, e1);
  const double q2 = norm(e2);
  e2 = scaled(e2, 1.0 / q2);

  const PlanarSplit sp = orthogonal_split({np, 0.0}, {q1, q2});
  const auto lift = [&](const Vec& v, double s) { return scaled(axpby(v[0], e1, v[1], e2), s); };
  const Mat F1 = with_rows(lift(sp.xplus, 1.0 / mu), lift(sp.yplus, mu));
  const Mat F0 = with_rows(lift(sp.xminus, 1.0 / mu), lift(sp.yminus, mu));
  out.laminate = Laminate::split(0.5, Laminate::leaf(F1), Laminate::leaf(F0));
  out.planar = sp;
  return out;
}

Laminate decompose_2x3(const Mat& F) { return decompose_2x3_detailed(F).laminate; }

namespace {

Laminate append_row(const Laminate& nu, const Vec& row) {
  if (nu.is_leaf()) {
    const Mat& M = nu.matrix();
    return Laminate::leaf(Mat::from_rows({M.row(0), M.row(1), row}));
  }
  return Laminate::split(nu.weight(), append_row(nu.left(), row), append_row(nu.right(), row));
}

}  // namespace

TripleDecomposition decompose_triple_3x3(const Mat& F, double tol, const GrowthSearchOptions& search) {
  if (F.rows() != 3 || F.cols() != 3) throw ArgumentError("decompose_triple_3x3: expected a 3×3 matrix");
  const double scale = F.row(0).empty() ? 0.0 : norm(F.row(0)) * norm(F.row(1)) * norm(F.row(2));
  if (!(std::abs(det(F)) > tol * std::max(scale, 1e-300)))
    throw DegenerateError("decompose_triple_3x3: determinant vanishes");

  TripleDecomposition out{Laminate::leaf(F), {}};
  const Integrand adj3 = Integrand::adj_row_product(3, 2);
  const CoincidenceQuery leaf_z{adj3, Integrand::abs_det(3)};

  const Mat top = F.row_block(0, 2);
  const Laminate stage1 = decompose_2x3(top);
  out.laminate = append_row(stage1, F.row(2));

  for (const auto& atom : out.laminate.atoms()) {
    LeafCertificate cert;
    cert.leaf = atom.matrix;
    if (in_coincidence_set(leaf_z, cert.leaf)) {
      cert.trivial = true;
      cert.report.level_class = LevelClass::OnLevelSet;
      out.certificates.push_back(std::move(cert));
      continue;
    }
    Mat M = cert.leaf;
    if (det(M) < 0.0) {
      M.set_row(2, scaled(M.row(2), -1.0));
      cert.reflected = true;
    }
    cert.alphas = choose_alphas_adj(M, 2);
    GradedPolynomial P = adjugate_polynomial(3, 0.5, cert.alphas.alpha1, cert.alphas.alpha0, 2);
    if (!P.check_homogeneity()) throw InvariantViolation("decompose_triple_3x3: inhomogeneous polynomial part");
    cert.p_value = P(M);
    cert.report = sublevel_membership_report(P, M, rank_one_cone(), 0.0, search);
    out.certificates.push_back(std::move(cert));
  }
  return out;
}

BlockSumDecomposition decompose_block_sum_detailed(const Mat& F, double tol) {
  if (F.rows() != 2 || F.cols() < 2 || F.cols() % 2 != 0)
    throw ArgumentError("decompose_block_sum: expected a 2×2N matrix");
  const std::size_t n = F.cols() / 2;
  BlockSumDecomposition out{Laminate::leaf(F), std::vector<double>(n, 0.0)};

  std::vector<std::optional<TwoPointSolution>> splits(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Mat B = block2(F, i);
    try {
      splits[i] = two_point_solution(B, tol);
    } catch (const DegenerateError&) {
      out.block_gaps[i] = eval(Integrand::prod_rows(2), B) - std::abs(det(B));
    }
  }

  const auto put_block = [](Mat M, std::size_t i, const Mat& B) {
    for (std::size_t r = 0; r < 2; ++r)
      for (std::size_t c = 0; c < 2; ++c) M(r, 2 * i + c) = B(r, c);
    return M;
  };
  // Nested product: block i splits inside every leaf of the blocks before it.
  std::function<Laminate(std::size_t, const Mat&)> build = [&](std::size_t i, const Mat& M) -> Laminate {
    if (i == n) return Laminate::leaf(M);
    if (!splits[i]) return build(i + 1, M);
    const auto& s = *splits[i];
    return Laminate::split(s.t, build(i + 1, put_block(M, i, s.F1)), build(i + 1, put_block(M, i, s.F0)));
  };
  out.laminate = build(0, F);
  return out;
}

Laminate decompose_block_sum(const Mat& F, double tol) { return decompose_block_sum_detailed(F, tol).laminate; }

}  // namespace qcx
