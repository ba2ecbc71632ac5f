#include "qcx/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qcx {

void VerifyReport::add_case(CaseRecord rec) {
  rec.index = cases.size();
  cases.push_back(std::move(rec));
}

std::size_t VerifyReport::pass_count() const {
  return static_cast<std::size_t>(std::count_if(cases.begin(), cases.end(), [](const auto& c) { return c.pass; }));
}

std::size_t VerifyReport::fail_count() const { return cases.size() - pass_count(); }

std::vector<std::pair<std::string, double>> VerifyReport::max_residuals() const {
  std::vector<std::pair<std::string, double>> out;
  for (const auto& c : cases) {
    for (const auto& [name, v] : c.residuals) {
      auto it = std::find_if(out.begin(), out.end(), [&](const auto& e) { return e.first == name; });
      if (it == out.end()) out.emplace_back(name, v);
      else if (v > it->second || std::isnan(v)) it->second = v;
    }
  }
  return out;
}

bool VerifyReport::passed() const {
  return fail_count() == 0 && std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.second; });
}

namespace {

// JSON has no NaN/Inf; they become strings so the document stays well-formed.
ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

}  // namespace

ordered_json VerifyReport::summary() const {
  ordered_json s;
  s["cases"] = cases.size();
  s["pass"] = pass_count();
  s["fail"] = fail_count();
  ordered_json mx = ordered_json::object();
  for (const auto& [name, v] : max_residuals()) mx[name] = number(v);
  s["max_residual"] = mx;
  ordered_json ch = ordered_json::object();
  for (const auto& [name, ok] : checks) ch[name] = ok;
  s["checks"] = ch;
  for (const auto& [k, v] : summary_extra.items()) s[k] = v;
  s["passed"] = passed();
  return s;
}

ordered_json VerifyReport::to_json(bool with_timing) const {
  ordered_json j;
  ordered_json meta = metadata;
  if (with_timing) meta["timing"] = {{"wall_seconds", wall_seconds}};
  j["metadata"] = meta;
  auto arr = ordered_json::array();
  for (const auto& c : cases) {
    ordered_json r;
    r["index"] = c.index;
    r["input"] = c.input;
    r["outcome"] = c.outcome;
    r["pass"] = c.pass;
    ordered_json res = ordered_json::object();
    for (const auto& [name, v] : c.residuals) res[name] = number(v);
    r["residuals"] = res;
    if (!c.artifacts.empty()) r["artifacts"] = c.artifacts;
    arr.push_back(std::move(r));
  }
  j["cases"] = arr;
  j["summary"] = summary();
  return j;
}

std::string VerifyReport::to_json_string(bool with_timing) const { return to_json(with_timing).dump(2) + "\n"; }

std::string VerifyReport::to_csv() const {
  std::vector<std::string> cols;
  for (const auto& c : cases)
    for (const auto& kv : c.residuals)
      if (std::find(cols.begin(), cols.end(), kv.first) == cols.end()) cols.push_back(kv.first);

  std::ostringstream os;
  os.precision(17);
  os << "index,outcome,pass";
  for (const auto& n : cols) os << ',' << n;
  os << '\n';
  for (const auto& c : cases) {
    os << c.index << ',' << c.outcome << ',' << (c.pass ? 1 : 0);
    for (const auto& n : cols) {
      os << ',';
      auto it = std::find_if(c.residuals.begin(), c.residuals.end(), [&](const auto& e) { return e.first == n; });
      if (it != c.residuals.end()) os << it->second;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace qcx
