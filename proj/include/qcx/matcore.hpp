#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "qcx/errors.hpp"

namespace qcx {

using Vec = std::vector<double>;

/// Dense real m×N matrix, row-major. Entries are finite on construction.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols);
  Mat(std::size_t rows, std::size_t cols, std::vector<double> entries);
  Mat(std::initializer_list<std::initializer_list<double>> rows);

  static Mat identity(std::size_t n);
  static Mat diag(std::span<const double> d);
  static Mat outer(std::span<const double> a, std::span<const double> b);
  static Mat from_rows(const std::vector<Vec>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  bool same_shape(const Mat& other) const { return rows_ == other.rows_ && cols_ == other.cols_; }
  bool is_square() const { return rows_ == cols_; }

  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  std::span<const double> entries() const { return data_; }
  std::span<const double> row_view(std::size_t i) const;
  Vec row(std::size_t i) const;
  Vec col(std::size_t j) const;
  void set_row(std::size_t i, std::span<const double> values);
  void set_col(std::size_t j, std::span<const double> values);

  /// Rows [first, first+count) as a new matrix.
  Mat row_block(std::size_t first, std::size_t count) const;
  /// Columns [first, first+count) as a new matrix.
  Mat col_block(std::size_t first, std::size_t count) const;
  Mat transpose() const;

  double frobenius_norm() const;
  double max_abs() const;
  bool all_finite() const;

  Mat& operator+=(const Mat& other);
  Mat& operator-=(const Mat& other);
  Mat& operator*=(double s);

  friend Mat operator+(Mat a, const Mat& b) { return a += b; }
  friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
  friend Mat operator*(Mat a, double s) { return a *= s; }
  friend Mat operator*(double s, Mat a) { return a *= s; }
  friend Mat operator-(Mat a) { return a *= -1.0; }
  friend bool operator==(const Mat& a, const Mat& b) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

enum class Axis { Row, Column };

struct RankOneReport {
  double defect = 0.0;
  bool is_rank_le_one = true;
};

// Vector helpers on plain spans.
double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
double norm2(std::span<const double> a);
Vec axpby(double alpha, std::span<const double> a, double beta, std::span<const double> b);
Vec scaled(std::span<const double> a, double s);

/// F[i1,j1]·F[i2,j2] − F[i1,j2]·F[i2,j1]. Indices are zero-based.
double minor2(const Mat& F, std::size_t i1, std::size_t i2, std::size_t j1, std::size_t j2);

/// Cofactor vector along row or column j (zero-based), so that det F = adj·F⁽ʲ⁾.
Vec adjugate_vector(const Mat& F, std::size_t j, Axis axis = Axis::Row);

/// Cofactor expansion for N ≤ 4, partially pivoted elimination above that.
double det(const Mat& F);

/// Counterclockwise quarter turn: (x₁, x₂) ↦ (−x₂, x₁).
Vec rot2(std::span<const double> x);

/// Applies rot2 to each consecutive pair of an even-length vector.
Vec rot_block(std::span<const double> x);

Vec cross3(std::span<const double> u, std::span<const double> v);

/// Largest 2×2 minor in magnitude divided by (1 + max|entry|²).
RankOneReport rank_one_defect(const Mat& A, double tol = 1e-9);

/// Σᵢ det of the consecutive 2×2 column blocks of a 2×2N matrix.
double block_det_sum(const Mat& F);

/// The i-th 2×2 column block (columns 2i, 2i+1) of a 2×2N matrix.
Mat block2(const Mat& F, std::size_t i);

}  // namespace qcx
