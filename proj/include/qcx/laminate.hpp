#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include <json.hpp>

#include "qcx/integrands.hpp"
#include "qcx/matcore.hpp"

namespace qcx {

/// Finitely supported probability measure on matrices built from nested two-point splits.
///
/// A split node with weight t places mass t on its left subtree and 1 − t on its right subtree.
/// Nodes are immutable and shared, so copies are cheap.
class Laminate {
 public:
  struct Atom {
    double weight;
    Mat matrix;
  };

  static Laminate leaf(Mat F);
  static Laminate split(double t, Laminate left, Laminate right);

  bool is_leaf() const;
  const Mat& matrix() const;  // leaf only
  double weight() const;      // split only
  const Laminate& left() const;
  const Laminate& right() const;

  std::size_t rows() const;
  std::size_t cols() const;
  std::size_t depth() const;
  std::size_t leaf_count() const;

  /// Flattened (weight, matrix) pairs; zero-weight atoms are dropped.
  std::vector<Atom> atoms() const;

 private:
  struct Node;
  explicit Laminate(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

Mat barycenter(const Laminate& nu);
double act(const Laminate& nu, const Integrand& g);
double act(const Laminate& nu, const std::function<double(const Mat&)>& g);

/// Which cone a split difference must lie in.
enum class SplitCone {
  RankOne,      // all 2×2 minors vanish
  BlockDetSum,  // Σᵢ det of the 2×2 column blocks vanishes (2×2N only)
};

/// Scaled distance of a split difference from the cone.
double cone_defect(const Mat& difference, SplitCone cone);

struct LaminateReport {
  double barycenter_residual = 0.0;
  double max_split_defect = 0.0;
  double weight_sum_residual = 0.0;
  int support_violations = 0;
  bool passed = true;  // all residuals within ValidateOptions::tol and no support violation
};

struct ValidateOptions {
  std::optional<CoincidenceQuery> support;
  std::optional<Mat> target;  // expected barycenter
  SplitCone cone = SplitCone::RankOne;
  double tol = 1e-9;
};

/// Fills every residual; never throws on a malformed measure, the report carries the failure.
/// The barycenter residual is max|bary − target| / (1 + max|target|), zero without a target.
LaminateReport validate(const Laminate& nu, const ValidateOptions& opts = {});
LaminateReport validate(const Laminate& nu, const std::optional<CoincidenceQuery>& support, double tol = 1e-9);

enum class FloatFormat { Decimal, Hex };

nlohmann::ordered_json to_json(const Mat& F, FloatFormat fmt = FloatFormat::Hex);
Mat mat_from_json(const nlohmann::json& j);

/// {"split": t, "left": …, "right": …} or {"leaf": [[…]]}.
nlohmann::ordered_json to_json(const Laminate& nu, FloatFormat fmt = FloatFormat::Hex);
Laminate laminate_from_json(const nlohmann::json& j);

/// "%a" formatting; parse accepts hex or decimal strings as well as JSON numbers.
std::string hex_float(double v);
double parse_float(const nlohmann::json& j);

}  // namespace qcx
