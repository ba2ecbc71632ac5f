#include "qcx/integrands.hpp"

#include <charconv>
#include <cmath>
#include <vector>

namespace qcx {

Integrand Integrand::prod_rows(std::size_t K) {
  if (K < 2) throw ArgumentError("prod_rows: K must be at least 2");
  return {IntegrandKind::ProdRows2xK, 2, K, 0, Axis::Row};
}

Integrand Integrand::adj_row_product(std::size_t N, std::size_t j, Axis axis) {
  if (N < 2 || j >= N) throw ArgumentError("adj_row_product: need N ≥ 2 and j < N");
  return {IntegrandKind::AdjRowProduct, N, N, j, axis};
}

Integrand Integrand::triple_product() { return {IntegrandKind::TripleProduct3x3, 3, 3, 0, Axis::Row}; }

Integrand Integrand::block_sum(std::size_t blocks) {
  if (blocks < 1) throw ArgumentError("block_sum: need at least one block");
  return {IntegrandKind::BlockSum, 2, 2 * blocks, 0, Axis::Row};
}

Integrand Integrand::abs_det(std::size_t N) {
  if (N < 1) throw ArgumentError("abs_det: N must be positive");
  return {IntegrandKind::AbsDet, N, N, 0, Axis::Row};
}

Integrand Integrand::cross_norm() { return {IntegrandKind::CrossNorm2x3, 2, 3, 0, Axis::Row}; }

Integrand Integrand::abs_block_det_sum(std::size_t blocks) {
  if (blocks < 1) throw ArgumentError("abs_block_det_sum: need at least one block");
  return {IntegrandKind::AbsBlockDetSum, 2, 2 * blocks, 0, Axis::Row};
}

Integrand Integrand::sum_abs_block_det(std::size_t blocks) {
  if (blocks < 1) throw ArgumentError("sum_abs_block_det: need at least one block");
  return {IntegrandKind::SumAbsBlockDet, 2, 2 * blocks, 0, Axis::Row};
}

std::string Integrand::name() const {
  switch (kind) {
    case IntegrandKind::ProdRows2xK:
      return "prod2x" + std::to_string(cols);
    case IntegrandKind::AdjRowProduct:
      return "adjrow:" + std::to_string(rows) + ":" + std::to_string(index + 1) +
             (axis == Axis::Column ? ":col" : "");
    case IntegrandKind::TripleProduct3x3:
      return "triple3x3";
    case IntegrandKind::BlockSum:
      return "blocksum:" + std::to_string(cols / 2);
    case IntegrandKind::AbsDet:
      return "absdet:" + std::to_string(rows);
    case IntegrandKind::CrossNorm2x3:
      return "cross2x3";
    case IntegrandKind::AbsBlockDetSum:
      return "absblockdetsum:" + std::to_string(cols / 2);
    case IntegrandKind::SumAbsBlockDet:
      return "sumabsblockdet:" + std::to_string(cols / 2);
  }
  return "unknown";
}

namespace {

std::vector<std::string_view> split_colon(std::string_view s) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(':', start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::size_t to_size(std::string_view s, std::string_view whole) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ArgumentError("unknown integrand name: " + std::string(whole));
  return v;
}

}  // namespace

Integrand parse_integrand(std::string_view name, std::optional<std::size_t> square_hint) {
  const auto parts = split_colon(name);
  const auto head = parts.front();
  const auto bad = [&] { return ArgumentError("unknown integrand name: " + std::string(name)); };

  if (head.starts_with("prod2x") && parts.size() == 1) return Integrand::prod_rows(to_size(head.substr(6), name));
  if (head == "triple3x3" && parts.size() == 1) return Integrand::triple_product();
  if (head == "cross2x3" && parts.size() == 1) return Integrand::cross_norm();
  if (head == "absdet") {
    if (parts.size() == 2) return Integrand::abs_det(to_size(parts[1], name));
    if (parts.size() == 1 && square_hint) return Integrand::abs_det(*square_hint);
    throw bad();
  }
  if (head == "adjrow" && (parts.size() == 3 || parts.size() == 4)) {
    const auto N = to_size(parts[1], name);
    const auto j = to_size(parts[2], name);
    Axis axis = Axis::Row;
    if (parts.size() == 4) {
      if (parts[3] == "col") axis = Axis::Column;
      else if (parts[3] != "row") throw bad();
    }
    if (j < 1) throw bad();
    return Integrand::adj_row_product(N, j - 1, axis);
  }
  if (parts.size() == 2) {
    const auto blocks = to_size(parts[1], name);
    if (head == "blocksum") return Integrand::block_sum(blocks);
    if (head == "absblockdetsum") return Integrand::abs_block_det_sum(blocks);
    if (head == "sumabsblockdet") return Integrand::sum_abs_block_det(blocks);
  }
  throw bad();
}

double eval(const Integrand& g, const Mat& F) {
  if (!g.shape_matches(F)) throw ArgumentError("eval: shape mismatch for " + g.name());
  switch (g.kind) {
    case IntegrandKind::ProdRows2xK:
      return norm(F.row_view(0)) * norm(F.row_view(1));
    case IntegrandKind::AdjRowProduct: {
      const Vec adj = adjugate_vector(F, g.index, g.axis);
      const Vec fj = g.axis == Axis::Row ? F.row(g.index) : F.col(g.index);
      return norm(adj) * norm(fj);
    }
    case IntegrandKind::TripleProduct3x3:
      return norm(F.row_view(0)) * norm(F.row_view(1)) * norm(F.row_view(2));
    case IntegrandKind::BlockSum: {
      double s = 0.0;
      for (std::size_t b = 0; b < F.cols(); b += 2)
        s += std::hypot(F(0, b), F(0, b + 1)) * std::hypot(F(1, b), F(1, b + 1));
      return s;
    }
    case IntegrandKind::AbsDet:
      return std::abs(det(F));
    case IntegrandKind::CrossNorm2x3:
      return norm(cross3(F.row_view(0), F.row_view(1)));
    case IntegrandKind::AbsBlockDetSum:
      return std::abs(block_det_sum(F));
    case IntegrandKind::SumAbsBlockDet: {
      double s = 0.0;
      for (std::size_t b = 0; b < F.cols(); b += 2) s += std::abs(F(0, b) * F(1, b + 1) - F(0, b + 1) * F(1, b));
      return s;
    }
  }
  throw ArgumentError("eval: unknown kind");
}

bool in_coincidence_set(const CoincidenceQuery& q, const Mat& F) {
  if (q.phi.rows != q.phi0.rows || q.phi.cols != q.phi0.cols)
    throw ArgumentError("in_coincidence_set: shapes of phi and phi0 differ");
  const double v0 = eval(q.phi0, F);
  return std::abs(eval(q.phi, F) - v0) <= q.tol * (1.0 + std::abs(v0));
}

bool is_matched_pair(const Integrand& phi, const Integrand& phi0) {
  using K = IntegrandKind;
  if (phi.rows != phi0.rows || phi.cols != phi0.cols) return false;
  switch (phi.kind) {
    case K::ProdRows2xK:
      if (phi.cols == 2 && (phi0.kind == K::AbsDet || phi0.kind == K::AbsBlockDetSum)) return true;
      if (phi.cols == 3 && phi0.kind == K::CrossNorm2x3) return true;
      return phi.cols % 2 == 0 && phi0.kind == K::AbsBlockDetSum;
    case K::AdjRowProduct:
    case K::TripleProduct3x3:
      return phi0.kind == K::AbsDet;
    case K::BlockSum:
      return phi0.kind == K::SumAbsBlockDet;
    default:
      return false;
  }
}

double hadamard_gap(const Integrand& phi, const Integrand& phi0, const Mat& F) {
  if (!is_matched_pair(phi, phi0))
    throw ArgumentError("hadamard_gap: unmatched pair " + phi.name() + " / " + phi0.name());
  return eval(phi, F) - eval(phi0, F);
}

}  // namespace qcx
