// qcx: batch verification of laminate constructions, level-set certificates and oracle sweeps.

#include <exception>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "qcx/runner.hpp"

namespace {

int finish(const qcx::VerifyReport& rep, const std::string& out, qcx::OutputFormat fmt) {
  if (out.empty() || out == "-") std::cout << qcx::render(rep, fmt);
  else qcx::write_report(rep, out, fmt);
  return rep.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qcx: laminate constructions, level-set certificates and rank-one envelope oracle"};
  app.set_version_flag("--version", std::string(qcx::kVersion));
  app.set_config("--config", "", "flat key = value file mirroring the long flags; flags win");
  app.require_subcommand(1);

  qcx::RunConfig cfg;
  std::string out;
  qcx::OutputFormat fmt = qcx::OutputFormat::Json;
  const std::map<std::string, qcx::OutputFormat> formats{{"json", qcx::OutputFormat::Json},
                                                          {"csv", qcx::OutputFormat::Csv}};
  const std::map<std::string, qcx::Axis> axes{{"row", qcx::Axis::Row}, {"column", qcx::Axis::Column}};

  // Shared flags live on the root so a flat config file can set them.
  app.add_option("--n", cfg.n, "number of sampled cases")->capture_default_str();
  app.add_option("--seed", cfg.seed, "sampling seed")->envname("QCX_SEED")->capture_default_str();
  app.add_option("--out", out, "output path (stdout when omitted)");
  app.add_option("--format", fmt, "json or csv")->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
  app.add_option("--tol-coincidence", cfg.tol.coincidence)->capture_default_str();
  app.add_option("--tol-barycenter", cfg.tol.barycenter)->capture_default_str();
  app.add_option("--tol-laminate", cfg.tol.split, "split-defect tolerance")->capture_default_str();
  app.add_option("--tol-act", cfg.tol.act)->capture_default_str();
  app.add_option("--tol-certificate", cfg.tol.certificate)->capture_default_str();
  app.add_option("--tol-oracle-gap", cfg.tol.oracle_gap)->capture_default_str();
  app.add_option("--tol-direction-failures", cfg.tol.direction_failures)->capture_default_str();

  app.add_option("--N", cfg.N, "blocks (2x2N, block-sum) or size (adjugate)");
  app.add_option("--j", cfg.j, "one-based row/column for adjugate")->capture_default_str();
  app.add_option("--axis", cfg.axis, "row or column")->transform(CLI::CheckedTransformer(axes, CLI::ignore_case));

  auto& oc = cfg.oracle;
  app.add_option("--depth", oc.depth)->capture_default_str();
  app.add_option("--dirs", oc.directions_per_level)->capture_default_str();
  app.add_option("--L,--line-halfwidth", oc.line_halfwidth)->capture_default_str();
  app.add_option("--samples", oc.line_samples)->capture_default_str();
  app.add_option("--oracle-seed", oc.seed)->capture_default_str();
  app.add_option("--beam", oc.refine_beam)->capture_default_str();
  app.add_option("--rounds", oc.refine_rounds)->capture_default_str();
  app.add_option("--budget", oc.budget, "integrand evaluations per estimate, 0 = unlimited")->capture_default_str();
  app.add_flag("--informed", cfg.informed, "inject constructor directions");
  app.add_flag("!--no-polish", oc.polish, "keep hull supports on the grid");
  app.add_flag("!--no-direction-polish", oc.polish_directions, "skip the local direction search");
  app.add_flag("--record-all", cfg.record_all, "hadamard: record every sample");

  auto* verify = app.add_subcommand("verify", "run a constructor or certificate pipeline on random matrices");
  verify->fallthrough();
  verify->add_option("case", cfg.case_name, "2x2 | 2x3 | 2x2N | adjugate | triple-3x3 | block-sum")
      ->required()
      ->check(CLI::IsMember({"2x2", "2x3", "2x2N", "adjugate", "triple-3x3", "block-sum"}));

  auto* oracle = app.add_subcommand("oracle", "sweep the lamination oracle against a matched envelope");
  oracle->fallthrough();
  oracle->add_option("phi", cfg.phi, "integrand, e.g. prod2x2")->required();
  oracle->add_option("phi0", cfg.phi0, "envelope, e.g. absdet")->required();

  auto* hadamard = app.add_subcommand("hadamard", "fuzz the gap φ − φ₀ of a matched pair");
  hadamard->fallthrough();
  hadamard->add_option("phi", cfg.phi)->required();
  hadamard->add_option("phi0", cfg.phi0)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*verify) return finish(qcx::cmd_verify(cfg), out, fmt);
    if (*oracle) return finish(qcx::cmd_oracle(cfg), out, fmt);
    if (*hadamard) return finish(qcx::cmd_hadamard(cfg), out, fmt);
  } catch (const std::exception& e) {
    std::cerr << "qcx: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
