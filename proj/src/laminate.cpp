#include "qcx/laminate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <variant>

namespace qcx {

struct Laminate::Node {
  struct Split {
    double t;
    Laminate left;
    Laminate right;
  };
  std::variant<Mat, Split> content;
  std::size_t rows = 0;
  std::size_t cols = 0;
};

Laminate Laminate::leaf(Mat F) {
  if (F.empty()) throw ArgumentError("Laminate::leaf: empty matrix");
  auto node = std::make_shared<Node>();
  node->rows = F.rows();
  node->cols = F.cols();
  node->content = std::move(F);
  return Laminate(std::move(node));
}

Laminate Laminate::split(double t, Laminate left, Laminate right) {
  if (!(t >= 0.0 && t <= 1.0)) throw ArgumentError("Laminate::split: weight outside [0,1]");
  if (!left.node_ || !right.node_) throw ArgumentError("Laminate::split: empty child");
  if (left.rows() != right.rows() || left.cols() != right.cols())
    throw ArgumentError("Laminate::split: children have different shapes");
  auto node = std::make_shared<Node>();
  node->rows = left.rows();
  node->cols = left.cols();
  node->content = Node::Split{t, std::move(left), std::move(right)};
  return Laminate(std::move(node));
}

bool Laminate::is_leaf() const { return std::holds_alternative<Mat>(node_->content); }

const Mat& Laminate::matrix() const {
  if (!is_leaf()) throw ArgumentError("Laminate::matrix: not a leaf");
  return std::get<Mat>(node_->content);
}

double Laminate::weight() const {
  if (is_leaf()) throw ArgumentError("Laminate::weight: leaf has no split weight");
  return std::get<Node::Split>(node_->content).t;
}

const Laminate& Laminate::left() const {
  if (is_leaf()) throw ArgumentError("Laminate::left: leaf");
  return std::get<Node::Split>(node_->content).left;
}

const Laminate& Laminate::right() const {
  if (is_leaf()) throw ArgumentError("Laminate::right: leaf");
  return std::get<Node::Split>(node_->content).right;
}

std::size_t Laminate::rows() const { return node_->rows; }
std::size_t Laminate::cols() const { return node_->cols; }

std::size_t Laminate::depth() const {
  if (is_leaf()) return 0;
  return 1 + std::max(left().depth(), right().depth());
}

std::size_t Laminate::leaf_count() const {
  if (is_leaf()) return 1;
  return left().leaf_count() + right().leaf_count();
}

namespace {

void collect_atoms(const Laminate& nu, double w, std::vector<Laminate::Atom>& out) {
  if (w <= 0.0) return;
  if (nu.is_leaf()) {
    out.push_back({w, nu.matrix()});
    return;
  }
  collect_atoms(nu.left(), w * nu.weight(), out);
  collect_atoms(nu.right(), w * (1.0 - nu.weight()), out);
}

}  // namespace

std::vector<Laminate::Atom> Laminate::atoms() const {
  std::vector<Atom> out;
  collect_atoms(*this, 1.0, out);
  return out;
}

Mat barycenter(const Laminate& nu) {
  if (nu.is_leaf()) return nu.matrix();
  const double t = nu.weight();
  return t * barycenter(nu.left()) + (1.0 - t) * barycenter(nu.right());
}

double act(const Laminate& nu, const std::function<double(const Mat&)>& g) {
  if (nu.is_leaf()) return g(nu.matrix());
  const double t = nu.weight();
  double v = 0.0;
  if (t > 0.0) v += t * act(nu.left(), g);
  if (t < 1.0) v += (1.0 - t) * act(nu.right(), g);
  return v;
}

double act(const Laminate& nu, const Integrand& g) {
  if (nu.rows() != g.rows || nu.cols() != g.cols) throw ArgumentError("act: shape mismatch for " + g.name());
  return act(nu, [&g](const Mat& F) { return eval(g, F); });
}

double cone_defect(const Mat& difference, SplitCone cone) {
  switch (cone) {
    case SplitCone::RankOne:
      return rank_one_defect(difference).defect;
    case SplitCone::BlockDetSum: {
      const double m = difference.max_abs();
      return std::abs(block_det_sum(difference)) / (1.0 + m * m);
    }
  }
  return 0.0;
}

namespace {

// Returns the barycenter of the subtree and accumulates the worst split defect.
Mat walk_splits(const Laminate& nu, SplitCone cone, double& worst) {
  if (nu.is_leaf()) return nu.matrix();
  Mat l = walk_splits(nu.left(), cone, worst);
  Mat r = walk_splits(nu.right(), cone, worst);
  const double t = nu.weight();
  if (t > 0.0 && t < 1.0) worst = std::max(worst, cone_defect(l - r, cone));
  return t * l + (1.0 - t) * r;
}

}  // namespace

LaminateReport validate(const Laminate& nu, const ValidateOptions& opts) {
  LaminateReport rep;
  double worst = 0.0;
  const Mat bary = walk_splits(nu, opts.cone, worst);
  rep.max_split_defect = worst;

  const auto atoms = nu.atoms();
  double wsum = 0.0;
  for (const auto& a : atoms) {
    wsum += a.weight;
    if (opts.support && !in_coincidence_set(*opts.support, a.matrix)) ++rep.support_violations;
  }
  rep.weight_sum_residual = std::abs(wsum - 1.0);

  if (opts.target) {
    if (!opts.target->same_shape(bary)) {
      rep.barycenter_residual = std::numeric_limits<double>::infinity();
    } else {
      rep.barycenter_residual = (bary - *opts.target).max_abs() / (1.0 + opts.target->max_abs());
    }
  }
  rep.passed = rep.barycenter_residual <= opts.tol && rep.max_split_defect <= opts.tol &&
               rep.weight_sum_residual <= opts.tol && rep.support_violations == 0;
  return rep;
}

LaminateReport validate(const Laminate& nu, const std::optional<CoincidenceQuery>& support, double tol) {
  ValidateOptions opts;
  opts.support = support;
  opts.tol = tol;
  return validate(nu, opts);
}

std::string hex_float(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_float(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw ArgumentError("parse_float: bad number '" + s + "'");
    return v;
  }
  throw ArgumentError("parse_float: expected number or string");
}

nlohmann::ordered_json to_json(const Mat& F, FloatFormat fmt) {
  auto rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < F.rows(); ++i) {
    auto r = nlohmann::ordered_json::array();
    for (std::size_t j = 0; j < F.cols(); ++j) {
      if (fmt == FloatFormat::Hex) r.push_back(hex_float(F(i, j)));
      else r.push_back(F(i, j));
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

Mat mat_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw ArgumentError("mat_from_json: expected non-empty array of rows");
  std::vector<Vec> rows;
  for (const auto& r : j) {
    if (!r.is_array()) throw ArgumentError("mat_from_json: row is not an array");
    Vec v;
    for (const auto& x : r) v.push_back(parse_float(x));
    rows.push_back(std::move(v));
  }
  return Mat::from_rows(rows);
}

nlohmann::ordered_json to_json(const Laminate& nu, FloatFormat fmt) {
  nlohmann::ordered_json j;
  if (nu.is_leaf()) {
    j["leaf"] = to_json(nu.matrix(), fmt);
    return j;
  }
  if (fmt == FloatFormat::Hex) j["split"] = hex_float(nu.weight());
  else j["split"] = nu.weight();
  j["left"] = to_json(nu.left(), fmt);
  j["right"] = to_json(nu.right(), fmt);
  return j;
}

Laminate laminate_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ArgumentError("laminate_from_json: expected object");
  if (j.contains("leaf")) return Laminate::leaf(mat_from_json(j.at("leaf")));
  if (j.contains("split")) {
    return Laminate::split(parse_float(j.at("split")), laminate_from_json(j.at("left")),
                           laminate_from_json(j.at("right")));
  }
  throw ArgumentError("laminate_from_json: expected 'leaf' or 'split'");
}

}  // namespace qcx
