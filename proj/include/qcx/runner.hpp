#pragma once

#include <cstdint>
#include <string>

#include "qcx/envelope_oracle.hpp"
#include "qcx/report.hpp"

namespace qcx {

inline constexpr const char* kVersion = "0.1.0";

enum class OutputFormat { Json, Csv };

struct Tolerances {
  double coincidence = 1e-9;
  double barycenter = 1e-10;
  double split = 1e-9;
  double act = 1e-9;
  double certificate = 1e-8;
  double oracle_gap = 5e-2;
  double direction_failures = 0.05;  // largest tolerated fraction of cases without a growth direction

  void validate() const;
};

struct RunConfig {
  std::string case_name = "2x2";  // verify: 2x2 | 2x3 | 2x2N | adjugate | triple-3x3 | block-sum
  std::size_t N = 0;              // blocks for 2x2N / block-sum, size for adjugate; 0 picks the default
  std::size_t j = 3;              // one-based row/column for adjugate
  Axis axis = Axis::Row;
  std::size_t n = 0;
  std::uint64_t seed = 42;
  Tolerances tol;
  OracleConfig oracle;
  bool informed = false;
  std::string phi;
  std::string phi0;
  bool record_all = false;  // hadamard: keep every sample, not only violations
};

VerifyReport cmd_verify(const RunConfig& cfg);
VerifyReport cmd_oracle(const RunConfig& cfg);
VerifyReport cmd_hadamard(const RunConfig& cfg);

/// Directions a constructor would split F along, for the oracle's informed mode. Empty when the
/// catalog has no rank-one constructor for this shape.
std::vector<Mat> constructor_directions(const Integrand& phi, const Mat& F);

std::string render(const VerifyReport& rep, OutputFormat fmt);
/// Writes the report; throws std::runtime_error on I/O failure.
void write_report(const VerifyReport& rep, const std::string& path, OutputFormat fmt);

}  // namespace qcx
