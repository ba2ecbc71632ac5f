#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace qcx {

using ordered_json = nlohmann::ordered_json;

struct CaseRecord {
  std::size_t index = 0;
  ordered_json input;  // hex-float matrix
  std::string outcome;
  bool pass = true;
  std::vector<std::pair<std::string, double>> residuals;  // category → value, in insertion order
  ordered_json artifacts = ordered_json::object();
};

/// Outcome of one verification run. Timing lives in its own field so the rest replays byte-for-byte.
class VerifyReport {
 public:
  ordered_json metadata = ordered_json::object();
  std::vector<CaseRecord> cases;
  /// Run-level checks that are not tied to one case, e.g. a failure fraction bound.
  std::vector<std::pair<std::string, bool>> checks;
  ordered_json summary_extra = ordered_json::object();
  double wall_seconds = 0.0;

  void add_case(CaseRecord rec);
  void add_check(std::string name, bool ok) { checks.emplace_back(std::move(name), ok); }

  std::size_t pass_count() const;
  std::size_t fail_count() const;
  /// Largest value per residual category across all cases.
  std::vector<std::pair<std::string, double>> max_residuals() const;
  bool passed() const;

  ordered_json summary() const;
  ordered_json to_json(bool with_timing = true) const;
  std::string to_json_string(bool with_timing = true) const;
  /// Flattened summary table: one row per case.
  std::string to_csv() const;
};

}  // namespace qcx
