#include "qcx/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "qcx/constructor.hpp"
#include "qcx/laminate.hpp"
#include "qcx/levelset.hpp"
#include "qcx/sampling.hpp"

namespace qcx {

void Tolerances::validate() const {
  for (double v : {coincidence, barycenter, split, act, certificate, oracle_gap, direction_failures})
    if (!(v > 0.0)) throw ArgumentError("tolerances must be positive");
}

namespace {

// Observed worst ratio of relative error to eps*kappa over 1e6 draws was about 1.8e3.
constexpr double kPExpressionSlack = 4096.0;

using Clock = std::chrono::steady_clock;

double rel(double a, double b) { return std::abs(a - b) / (b != 0.0 ? std::abs(b) : 1.0); }

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  template <class Accept>
  Mat draw(std::size_t rows, std::size_t cols, Accept accept) {
    for (;;) {
      Mat F = rng_.uniform_matrix(rows, cols);
      if (accept(F)) return F;
      if (++rejected_ > 10000000) throw SearchError("sampler rejects every draw");
    }
  }
  std::uint64_t rejected() const { return rejected_; }

 private:
  Rng rng_;
  std::uint64_t rejected_ = 0;
};

bool rows_nonzero(const Mat& F) {
  for (std::size_t i = 0; i < F.rows(); ++i)
    if (norm(F.row_view(i)) <= 1e-6) return false;
  return true;
}

ordered_json tolerance_echo(const Tolerances& t) {
  return {{"coincidence", t.coincidence}, {"barycenter", t.barycenter},   {"split", t.split},
          {"act", t.act},                 {"certificate", t.certificate}, {"oracle_gap", t.oracle_gap},
          {"direction_failures", t.direction_failures}};
}

ordered_json oracle_echo(const OracleConfig& o) {
  return {{"depth", o.depth},
          {"directions_per_level", o.directions_per_level},
          {"line_halfwidth", o.line_halfwidth},
          {"line_samples", o.line_samples},
          {"seed", o.seed},
          {"refine_beam", o.refine_beam},
          {"refine_rounds", o.refine_rounds},
          {"polish", o.polish},
          {"polish_directions", o.polish_directions},
          {"budget", o.budget}};
}

ordered_json base_metadata(const char* subcommand, const RunConfig& cfg) {
  ordered_json m;
  m["tool"] = "qcx";
  m["version"] = kVersion;
  m["subcommand"] = subcommand;
  m["seed"] = cfg.seed;
  m["n"] = cfg.n;
  m["tolerances"] = tolerance_echo(cfg.tol);
  return m;
}

struct LaminateChecks {
  LaminateReport report;
  double act_rel = 0.0;
};

LaminateChecks check_laminate(const Laminate& nu, const Mat& F, const CoincidenceQuery& z, SplitCone cone,
                              double phi0_value, const Tolerances& tol) {
  ValidateOptions vo;
  vo.support = z;
  vo.target = F;
  vo.cone = cone;
  vo.tol = tol.split;
  LaminateChecks c;
  c.report = validate(nu, vo);
  c.act_rel = rel(act(nu, z.phi), phi0_value);
  return c;
}

void add_laminate_residuals(CaseRecord& rec, const LaminateChecks& c) {
  rec.residuals.emplace_back("barycenter", c.report.barycenter_residual);
  rec.residuals.emplace_back("split_defect", c.report.max_split_defect);
  rec.residuals.emplace_back("weight_sum", c.report.weight_sum_residual);
  rec.residuals.emplace_back("support_violations", c.report.support_violations);
  rec.residuals.emplace_back("act_rel", c.act_rel);
}

bool laminate_ok(const LaminateChecks& c, const Tolerances& tol) {
  return c.report.barycenter_residual <= tol.barycenter && c.report.max_split_defect <= tol.split &&
         c.report.weight_sum_residual <= 1e-12 && c.report.support_violations == 0 && c.act_rel <= tol.act;
}

// --- verify cases ---------------------------------------------------------------------------

CaseRecord verify_2x2N(const Mat& F, const Tolerances& tol) {
  const std::size_t K = F.cols();
  const double D = block_det_sum(F);
  const Integrand phi = Integrand::prod_rows(K);
  const Integrand phi0 = K == 2 ? Integrand::abs_det(2) : Integrand::abs_block_det_sum(K / 2);
  const CoincidenceQuery z{phi, phi0, tol.coincidence};

  CaseRecord rec;
  rec.input = to_json(F);
  const auto sol = two_point_solution(F);
  const Laminate nu = sol ? Laminate::split(sol->t, Laminate::leaf(sol->F1), Laminate::leaf(sol->F0))
                          : Laminate::leaf(F);
  const SplitCone cone = K == 2 ? SplitCone::RankOne : SplitCone::BlockDetSum;
  const LaminateChecks c = check_laminate(nu, F, z, cone, std::abs(D), tol);
  add_laminate_residuals(rec, c);
  if (K > 2) {
    // Informational: the split lies in the block-determinant cone, not the rank-one cone.
    rec.residuals.emplace_back("rank_one_defect_info", sol ? rank_one_defect(sol->F1 - sol->F0).defect : 0.0);
  }
  rec.pass = laminate_ok(c, tol);
  rec.outcome = sol ? (rec.pass ? "split" : "split_invalid") : "dirac";
  if (sol) {
    rec.artifacts["t"] = hex_float(sol->t);
    rec.artifacts["alpha1"] = hex_float(sol->alpha1);
    rec.artifacts["alpha0"] = hex_float(sol->alpha0);
  }
  rec.artifacts["laminate"] = to_json(nu);
  return rec;
}

CaseRecord verify_2x3(const Mat& F, const Tolerances& tol) {
  const double cr = norm(cross3(F.row(0), F.row(1)));
  const CoincidenceQuery z{Integrand::prod_rows(3), Integrand::cross_norm(), tol.coincidence};
  CaseRecord rec;
  rec.input = to_json(F);
  const Split2x3 s = decompose_2x3_detailed(F);
  const LaminateChecks c = check_laminate(s.laminate, F, z, SplitCone::RankOne, cr, tol);
  add_laminate_residuals(rec, c);
  const bool two_halves = !s.laminate.is_leaf() && s.laminate.leaf_count() == 2 && s.laminate.weight() == 0.5;
  rec.residuals.emplace_back("perturbation", s.perturbation);
  rec.pass = laminate_ok(c, tol) && (two_halves || s.laminate.is_leaf()) && s.perturbation == 0.0;
  rec.outcome = s.laminate.is_leaf() ? "dirac" : (rec.pass ? "split" : "split_invalid");
  rec.artifacts["laminate"] = to_json(s.laminate);
  return rec;
}

void add_certificate(CaseRecord& rec, const GradedPolynomial& P, const SegmentCertificate& cert,
                     const Tolerances& tol, bool& ok) {
  const CertificateCheck chk = check_certificate(P, cert);
  rec.residuals.emplace_back("certificate_identity", chk.identity_residual);
  rec.residuals.emplace_back("certificate_residual", std::max(chk.residual_B, chk.residual_C));
  rec.residuals.emplace_back("certificate_rank_one_defect", chk.rank_one_defect);
  rec.residuals.emplace_back("certificate_direction", chk.direction_residual);
  ok = ok && chk.identity_residual <= 1e-12 && chk.residual_B <= tol.certificate &&
       chk.residual_C <= tol.certificate && chk.rank_one_defect <= tol.split && chk.direction_residual <= 1e-12 &&
       chk.s_in_unit_interval;
}

CaseRecord verify_adjugate(const Mat& F, std::size_t j, Axis axis, const Tolerances& tol, bool& direction_missing) {
  CaseRecord rec;
  rec.input = to_json(F);
  const std::size_t N = F.rows();
  const AlphaPair al = choose_alphas_adj(F, j, axis);
  const Vec adj = adjugate_vector(F, j, axis);
  const Vec fj = axis == Axis::Row ? F.row(j) : F.col(j);
  const double d = det(F);
  const double expected = -(norm2(adj) / norm2(fj)) * d;
  GradedPolynomial P = adjugate_polynomial(N, 0.5, al.alpha1, al.alpha0, j, axis);
  const bool homogeneous = P.check_homogeneity();
  const double pv = P_adj(F, 0.5, al.alpha1, al.alpha0, j, axis);

  bool ok = al.alpha1 > 0.0 && al.alpha0 > 0.0 && homogeneous && pv < 0.0;
  const double prel = rel(pv, expected);
  // The roots alpha are rounded to double; P reacts to that rounding with a factor of kappa.
  const double kappa = 4.0 * norm2(adj) * norm2(fj) / (d * d);
  const double pbound = std::max(1e-10, kPExpressionSlack * std::numeric_limits<double>::epsilon() * kappa);
  ok = ok && prel <= pbound;
  rec.residuals.emplace_back("p_expression_rel", prel);
  rec.residuals.emplace_back("p_expression_condition", kappa);
  rec.residuals.emplace_back("p_expression_bound", pbound);
  rec.artifacts["alpha1"] = hex_float(al.alpha1);
  rec.artifacts["alpha0"] = hex_float(al.alpha0);
  rec.artifacts["P_at_F"] = hex_float(pv);

  const SublevelReport rep = sublevel_membership_report(P, F, rank_one_cone(tol.split), 0.0);
  rec.artifacts["level_class"] = to_string(rep.level_class);
  direction_missing = false;
  if (rep.certificate) {
    add_certificate(rec, P, *rep.certificate, tol, ok);
    rec.artifacts["certificate"] = to_json(*rep.certificate);
    rec.outcome = ok ? "certified" : "certificate_invalid";
  } else {
    direction_missing = true;
    rec.artifacts["failure"] = rep.failure;
    rec.outcome = ok ? "direction_not_found" : "invalid";
  }
  rec.pass = ok;
  return rec;
}

CaseRecord verify_triple(const Mat& F, const Tolerances& tol, int& leaves_missing, int& leaves_total) {
  CaseRecord rec;
  rec.input = to_json(F);
  const TripleDecomposition td = decompose_triple_3x3(F);
  ValidateOptions vo;
  vo.target = F;
  vo.tol = tol.split;
  const LaminateReport lr = validate(td.laminate, vo);
  const double d = std::abs(det(F));
  const double adj_act = act(td.laminate, Integrand::adj_row_product(3, 2));
  // Stage 1 leaves satisfy |F⁽¹⁾||F⁽²⁾| = |F⁽¹⁾×F⁽²⁾| for the top two rows.
  double stage1_gap = 0.0;
  for (const auto& a : td.laminate.atoms()) {
    const Mat top = a.matrix.row_block(0, 2);
    stage1_gap = std::max(stage1_gap, rel(eval(Integrand::prod_rows(3), top), eval(Integrand::cross_norm(), top)));
  }
  rec.residuals.emplace_back("barycenter", lr.barycenter_residual);
  rec.residuals.emplace_back("split_defect", lr.max_split_defect);
  rec.residuals.emplace_back("stage1_coincidence", stage1_gap);
  rec.residuals.emplace_back("adj_act_minus_det", std::max(0.0, (d - adj_act) / (1.0 + d)));
  bool ok = lr.barycenter_residual <= tol.barycenter && lr.max_split_defect <= tol.split && stage1_gap <= 1e-9 &&
            adj_act >= d - 1e-12 * (1.0 + d);

  auto certs = ordered_json::array();
  int missing = 0;
  for (const auto& lc : td.certificates) {
    ++leaves_total;
    ordered_json jc;
    jc["trivial"] = lc.trivial;
    jc["reflected"] = lc.reflected;
    if (!lc.trivial) {
      jc["P_at_leaf"] = hex_float(lc.p_value);
      ok = ok && lc.p_value <= 0.0;
      if (lc.report.certificate) {
        GradedPolynomial P = adjugate_polynomial(3, 0.5, lc.alphas.alpha1, lc.alphas.alpha0, 2);
        CaseRecord tmp;
        add_certificate(tmp, P, *lc.report.certificate, tol, ok);
        for (auto& kv : tmp.residuals) {
          auto it = std::find_if(rec.residuals.begin(), rec.residuals.end(),
                                 [&](const auto& e) { return e.first == kv.first; });
          if (it == rec.residuals.end()) rec.residuals.push_back(kv);
          else it->second = std::max(it->second, kv.second);
        }
        jc["certificate"] = to_json(*lc.report.certificate);
      } else {
        ++missing;
        jc["failure"] = lc.report.failure;
      }
    }
    certs.push_back(std::move(jc));
  }
  leaves_missing += missing;
  rec.artifacts["laminate"] = to_json(td.laminate);
  rec.artifacts["certificates"] = certs;
  rec.pass = ok;
  rec.outcome = !ok ? "invalid" : (missing > 0 ? "direction_not_found" : "certified");
  return rec;
}

CaseRecord verify_block_sum(const Mat& F, const Tolerances& tol) {
  const std::size_t n = F.cols() / 2;
  double target = 0.0;
  for (std::size_t i = 0; i < n; ++i) target += std::abs(det(block2(F, i)));
  const CoincidenceQuery z{Integrand::block_sum(n), Integrand::sum_abs_block_det(n), tol.coincidence};
  CaseRecord rec;
  rec.input = to_json(F);
  const BlockSumDecomposition bs = decompose_block_sum_detailed(F);
  const LaminateChecks c = check_laminate(bs.laminate, F, z, SplitCone::RankOne, target, tol);
  add_laminate_residuals(rec, c);
  double gap = 0.0;
  for (double g : bs.block_gaps) gap += g;
  rec.residuals.emplace_back("degenerate_block_gap", gap);
  rec.pass = laminate_ok(c, tol);
  rec.outcome = rec.pass ? "product_laminate" : "invalid";
  rec.artifacts["laminate"] = to_json(bs.laminate);
  return rec;
}

}  // namespace

VerifyReport cmd_verify(const RunConfig& cfg) {
  cfg.tol.validate();
  const auto start = Clock::now();
  VerifyReport rep;
  rep.metadata = base_metadata("verify", cfg);
  rep.metadata["case"] = cfg.case_name;
  Sampler sampler(cfg.seed);
  const auto& c = cfg.case_name;

  if (c == "2x2" || c == "2x2N") {
    const std::size_t blocks = c == "2x2" ? 1 : (cfg.N ? cfg.N : 2);
    if (blocks < 1) throw ArgumentError("verify 2x2N: N must be at least 1");
    rep.metadata["N"] = blocks;
    for (std::size_t i = 0; i < cfg.n; ++i) {
      const Mat F = sampler.draw(2, 2 * blocks, [](const Mat& M) {
        return std::abs(block_det_sum(M)) > 1e-6 && rows_nonzero(M);
      });
      rep.add_case(verify_2x2N(F, cfg.tol));
    }
  } else if (c == "2x3") {
    for (std::size_t i = 0; i < cfg.n; ++i) {
      const Mat F = sampler.draw(2, 3, [](const Mat& M) {
        return rows_nonzero(M) && norm(cross3(M.row(0), M.row(1))) > 1e-6;
      });
      rep.add_case(verify_2x3(F, cfg.tol));
    }
  } else if (c == "adjugate") {
    const std::size_t N = cfg.N ? cfg.N : 3;
    if (N < 3) throw ArgumentError("verify adjugate: N must be at least 3");
    if (cfg.j < 1 || cfg.j > N) throw ArgumentError("verify adjugate: j must lie in 1..N");
    rep.metadata["N"] = N;
    rep.metadata["j"] = cfg.j;
    rep.metadata["axis"] = cfg.axis == Axis::Row ? "row" : "column";
    std::size_t missing = 0, above_flat = 0;
    for (std::size_t i = 0; i < cfg.n; ++i) {
      const Mat F = sampler.draw(N, N, [](const Mat& M) { return det(M) > 1e-3; });
      bool miss = false;
      CaseRecord rec = verify_adjugate(F, cfg.j - 1, cfg.axis, cfg.tol, miss);
      for (const auto& [k, v] : rec.residuals)
        if (k == "p_expression_rel" && v > 1e-10) ++above_flat;
      rep.add_case(std::move(rec));
      missing += miss ? 1 : 0;
    }
    const double frac = cfg.n ? static_cast<double>(missing) / static_cast<double>(cfg.n) : 0.0;
    rep.summary_extra["p_expression_above_1e-10"] = above_flat;
    rep.summary_extra["direction_failures"] = missing;
    rep.summary_extra["direction_failure_fraction"] = frac;
    rep.add_check("direction_failure_fraction", frac <= cfg.tol.direction_failures);
  } else if (c == "triple-3x3") {
    int missing = 0, total = 0;
    for (std::size_t i = 0; i < cfg.n; ++i) {
      const Mat F = sampler.draw(3, 3, [](const Mat& M) { return std::abs(det(M)) > 1e-3; });
      rep.add_case(verify_triple(F, cfg.tol, missing, total));
    }
    const double frac = total ? static_cast<double>(missing) / total : 0.0;
    rep.summary_extra["leaf_direction_failures"] = missing;
    rep.summary_extra["leaf_direction_failure_fraction"] = frac;
    rep.add_check("direction_failure_fraction", frac <= cfg.tol.direction_failures);
  } else if (c == "block-sum") {
    const std::size_t blocks = cfg.N ? cfg.N : 2;
    rep.metadata["N"] = blocks;
    for (std::size_t i = 0; i < cfg.n; ++i) {
      const Mat F = sampler.draw(2, 2 * blocks, [blocks](const Mat& M) {
        for (std::size_t b = 0; b < blocks; ++b)
          if (std::abs(det(block2(M, b))) <= 1e-6) return false;
        return rows_nonzero(M);
      });
      rep.add_case(verify_block_sum(F, cfg.tol));
    }
  } else {
    throw ArgumentError("verify: unknown case '" + c + "'");
  }
  rep.metadata["rejected_draws"] = sampler.rejected();
  rep.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return rep;
}

std::vector<Mat> constructor_directions(const Integrand& phi, const Mat& F) {
  std::vector<Mat> out;
  try {
    if (phi.kind == IntegrandKind::ProdRows2xK && phi.cols == 3) {
      const Laminate nu = decompose_2x3(F);
      if (!nu.is_leaf()) out.push_back(barycenter(nu.left()) - barycenter(nu.right()));
    } else if (phi.kind == IntegrandKind::ProdRows2xK) {
      if (const auto s = two_point_solution(F)) out.push_back(s->F1 - s->F0);
    } else if (phi.kind == IntegrandKind::BlockSum) {
      for (std::size_t i = 0; i < F.cols() / 2; ++i) {
        if (const auto s = two_point_solution(block2(F, i))) {
          Mat D(F.rows(), F.cols());
          const Mat d = s->F1 - s->F0;
          for (std::size_t r = 0; r < 2; ++r)
            for (std::size_t k = 0; k < 2; ++k) D(r, 2 * i + k) = d(r, k);
          out.push_back(D);
        }
      }
    }
  } catch (const DegenerateError&) {
  }
  return out;
}

VerifyReport cmd_oracle(const RunConfig& cfg) {
  cfg.tol.validate();
  const auto start = Clock::now();
  const Integrand phi = parse_integrand(cfg.phi);
  const Integrand phi0 =
      parse_integrand(cfg.phi0, phi.rows == phi.cols ? std::optional<std::size_t>(phi.rows) : std::nullopt);
  if (!is_matched_pair(phi, phi0))
    throw ArgumentError("oracle: " + phi.name() + " and " + phi0.name() + " are not a matched pair");

  SamplerSpec sp;
  sp.rows = phi.rows;
  sp.cols = phi.cols;
  sp.seed = cfg.seed;
  sp.accept = rows_nonzero;
  SweepOptions so;
  so.gap_tol = cfg.tol.oracle_gap;
  if (cfg.informed) so.informer = [phi](const Mat& F) { return constructor_directions(phi, F); };

  VerifyReport rep = sweep(phi, phi0, sp, cfg.n, cfg.oracle, so);
  ordered_json meta = base_metadata("oracle", cfg);
  meta["phi"] = phi.name();
  meta["phi0"] = phi0.name();
  meta["informed"] = cfg.informed;
  meta["oracle"] = oracle_echo(cfg.oracle);
  meta["rejected_draws"] = rep.metadata["rejected_draws"];
  rep.metadata = meta;
  rep.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return rep;
}

VerifyReport cmd_hadamard(const RunConfig& cfg) {
  const auto start = Clock::now();
  const Integrand phi = parse_integrand(cfg.phi);
  const Integrand phi0 =
      parse_integrand(cfg.phi0, phi.rows == phi.cols ? std::optional<std::size_t>(phi.rows) : std::nullopt);
  if (!is_matched_pair(phi, phi0))
    throw ArgumentError("hadamard: " + phi.name() + " and " + phi0.name() + " are not a matched pair");

  VerifyReport rep;
  rep.metadata = base_metadata("hadamard", cfg);
  rep.metadata["phi"] = phi.name();
  rep.metadata["phi0"] = phi0.name();
  rep.metadata["record_all"] = cfg.record_all;
  Rng rng(cfg.seed);
  std::size_t violations = 0;
  double min_scaled_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cfg.n; ++i) {
    const Mat F = rng.uniform_matrix(phi.rows, phi.cols);
    const double g = hadamard_gap(phi, phi0, F);
    const double scaled_gap = g / (1.0 + std::abs(eval(phi, F)));
    min_scaled_gap = std::min(min_scaled_gap, scaled_gap);
    const bool ok = scaled_gap >= -1e-12;
    if (!ok) ++violations;
    if (ok && !cfg.record_all) continue;
    CaseRecord rec;
    rec.input = to_json(F);
    rec.pass = ok;
    rec.outcome = ok ? "ok" : "violation";
    rec.residuals.emplace_back("gap", g);
    rec.artifacts["sample"] = i;
    rep.add_case(std::move(rec));
  }
  rep.summary_extra["samples"] = cfg.n;
  rep.summary_extra["violations"] = violations;
  if (cfg.n > 0) rep.summary_extra["min_scaled_gap"] = min_scaled_gap;
  rep.add_check("no_violations", violations == 0);
  rep.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return rep;
}

std::string render(const VerifyReport& rep, OutputFormat fmt) {
  return fmt == OutputFormat::Json ? rep.to_json_string() : rep.to_csv();
}

void write_report(const VerifyReport& rep, const std::string& path, OutputFormat fmt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << render(rep, fmt);
  out.flush();
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace qcx
