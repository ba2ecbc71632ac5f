#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "qcx/matcore.hpp"

namespace qcx {

enum class IntegrandKind {
  ProdRows2xK,       // |F⁽¹⁾| |F⁽²⁾| on 2×K
  AdjRowProduct,     // |adj⁽ʲ⁾F| |F⁽ʲ⁾| on N×N
  TripleProduct3x3,  // |F⁽¹⁾| |F⁽²⁾| |F⁽³⁾|
  BlockSum,          // Σᵢ |Fᵢ⁽¹⁾| |Fᵢ⁽²⁾| over 2×2 column blocks
  AbsDet,            // |det F|
  CrossNorm2x3,      // |F⁽¹⁾ × F⁽²⁾|
  AbsBlockDetSum,    // |Σᵢ det Fᵢ|
  SumAbsBlockDet,    // Σᵢ |det Fᵢ|
};

/// One entry of the fixed integrand catalog together with the matrix shape it acts on.
struct Integrand {
  IntegrandKind kind = IntegrandKind::AbsDet;
  std::size_t rows = 2;
  std::size_t cols = 2;
  std::size_t index = 0;  // AdjRowProduct: zero-based row/column j
  Axis axis = Axis::Row;

  static Integrand prod_rows(std::size_t K);
  static Integrand adj_row_product(std::size_t N, std::size_t j, Axis axis = Axis::Row);
  static Integrand triple_product();
  static Integrand block_sum(std::size_t blocks);
  static Integrand abs_det(std::size_t N);
  static Integrand cross_norm();
  static Integrand abs_block_det_sum(std::size_t blocks);
  static Integrand sum_abs_block_det(std::size_t blocks);

  /// Stable textual name, e.g. "prod2x3", "adjrow:3:3", "absdet:2". Row/column j is one-based.
  std::string name() const;
  bool shape_matches(const Mat& F) const { return F.rows() == rows && F.cols() == cols; }

  friend bool operator==(const Integrand&, const Integrand&) = default;
};

/// Parses a catalog name. "absdet" without a size borrows `square_hint` (required then).
Integrand parse_integrand(std::string_view name, std::optional<std::size_t> square_hint = std::nullopt);

double eval(const Integrand& g, const Mat& F);

struct CoincidenceQuery {
  Integrand phi;
  Integrand phi0;
  double tol = 1e-9;
};

/// |φ(F) − φ₀(F)| ≤ tol·(1 + |φ₀(F)|).
bool in_coincidence_set(const CoincidenceQuery& q, const Mat& F);

/// True for the pairs whose gap φ − φ₀ is a Hadamard-type inequality.
bool is_matched_pair(const Integrand& phi, const Integrand& phi0);

/// φ(F) − φ₀(F) for a matched pair; throws ArgumentError otherwise.
double hadamard_gap(const Integrand& phi, const Integrand& phi0, const Mat& F);

}  // namespace qcx
