#include "qcx/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qcx {

Mat::Mat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Mat::Mat(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows_ * cols_) {
    throw ArgumentError("Mat: expected " + std::to_string(rows_ * cols_) + " entries, got " +
                        std::to_string(data_.size()));
  }
  if (!all_finite()) throw ArgumentError("Mat: non-finite entry");
}

Mat::Mat(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ArgumentError("Mat: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
  if (!all_finite()) throw ArgumentError("Mat: non-finite entry");
}

Mat Mat::identity(std::size_t n) {
  Mat I(n, n);
  for (std::size_t i = 0; i < n; ++i) I(i, i) = 1.0;
  return I;
}

Mat Mat::diag(std::span<const double> d) {
  Mat D(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) D(i, i) = d[i];
  return D;
}

Mat Mat::outer(std::span<const double> a, std::span<const double> b) {
  Mat M(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) M(i, j) = a[i] * b[j];
  return M;
}

Mat Mat::from_rows(const std::vector<Vec>& rows) {
  if (rows.empty()) return {};
  std::vector<double> data;
  const std::size_t n = rows.front().size();
  for (const auto& r : rows) {
    if (r.size() != n) throw ArgumentError("Mat::from_rows: ragged rows");
    data.insert(data.end(), r.begin(), r.end());
  }
  return Mat(rows.size(), n, std::move(data));
}

std::span<const double> Mat::row_view(std::size_t i) const {
  if (i >= rows_) throw ArgumentError("Mat::row: index out of range");
  return std::span<const double>(data_).subspan(i * cols_, cols_);
}

Vec Mat::row(std::size_t i) const {
  auto v = row_view(i);
  return Vec(v.begin(), v.end());
}

Vec Mat::col(std::size_t j) const {
  if (j >= cols_) throw ArgumentError("Mat::col: index out of range");
  Vec c(rows_);
  for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

void Mat::set_row(std::size_t i, std::span<const double> values) {
  if (i >= rows_ || values.size() != cols_) throw ArgumentError("Mat::set_row: shape mismatch");
  std::copy(values.begin(), values.end(), data_.begin() + static_cast<std::ptrdiff_t>(i * cols_));
}

void Mat::set_col(std::size_t j, std::span<const double> values) {
  if (j >= cols_ || values.size() != rows_) throw ArgumentError("Mat::set_col: shape mismatch");
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = values[i];
}

Mat Mat::row_block(std::size_t first, std::size_t count) const {
  if (first + count > rows_) throw ArgumentError("Mat::row_block: out of range");
  Mat out(count, cols_);
  for (std::size_t i = 0; i < count; ++i) out.set_row(i, row_view(first + i));
  return out;
}

Mat Mat::col_block(std::size_t first, std::size_t count) const {
  if (first + count > cols_) throw ArgumentError("Mat::col_block: out of range");
  Mat out(rows_, count);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < count; ++j) out(i, j) = (*this)(i, first + j);
  return out;
}

Mat Mat::transpose() const {
  Mat T(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) T(j, i) = (*this)(i, j);
  return T;
}

double Mat::frobenius_norm() const { return norm(data_); }

double Mat::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

bool Mat::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Mat& Mat::operator+=(const Mat& other) {
  if (!same_shape(other)) throw ArgumentError("Mat: shape mismatch in +");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

Mat& Mat::operator-=(const Mat& other) {
  if (!same_shape(other)) throw ArgumentError("Mat: shape mismatch in -");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

Mat& Mat::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ArgumentError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return dot(a, a); }

double norm(std::span<const double> a) { return std::sqrt(norm2(a)); }

Vec axpby(double alpha, std::span<const double> a, double beta, std::span<const double> b) {
  if (a.size() != b.size()) throw ArgumentError("axpby: length mismatch");
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = alpha * a[i] + beta * b[i];
  return out;
}

Vec scaled(std::span<const double> a, double s) {
  Vec out(a.begin(), a.end());
  for (double& v : out) v *= s;
  return out;
}

double minor2(const Mat& F, std::size_t i1, std::size_t i2, std::size_t j1, std::size_t j2) {
  if (i1 >= F.rows() || i2 >= F.rows() || j1 >= F.cols() || j2 >= F.cols())
    throw ArgumentError("minor2: index out of range");
  if (i1 == i2 || j1 == j2) throw ArgumentError("minor2: indices must be distinct");
  return F(i1, j1) * F(i2, j2) - F(i1, j2) * F(i2, j1);
}

namespace {

Mat delete_row_col(const Mat& F, std::size_t r, std::size_t c) {
  const std::size_t n = F.rows();
  Mat M(n - 1, n - 1);
  for (std::size_t i = 0, mi = 0; i < n; ++i) {
    if (i == r) continue;
    for (std::size_t j = 0, mj = 0; j < n; ++j) {
      if (j == c) continue;
      M(mi, mj++) = F(i, j);
    }
    ++mi;
  }
  return M;
}

double det_cofactor(const Mat& F) {
  const std::size_t n = F.rows();
  switch (n) {
    case 0:
      return 1.0;
    case 1:
      return F(0, 0);
    case 2:
      return F(0, 0) * F(1, 1) - F(0, 1) * F(1, 0);
    case 3:
      return F(0, 0) * (F(1, 1) * F(2, 2) - F(1, 2) * F(2, 1)) -
             F(0, 1) * (F(1, 0) * F(2, 2) - F(1, 2) * F(2, 0)) +
             F(0, 2) * (F(1, 0) * F(2, 1) - F(1, 1) * F(2, 0));
    default: {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        s += sign * F(0, j) * det_cofactor(delete_row_col(F, 0, j));
      }
      return s;
    }
  }
}

double det_elimination(Mat A) {
  const std::size_t n = A.rows();
  double d = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(A(i, k)) > std::abs(A(p, k))) p = i;
    if (A(p, k) == 0.0) return 0.0;
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(A(p, j), A(k, j));
      d = -d;
    }
    d *= A(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = A(i, k) / A(k, k);
      for (std::size_t j = k; j < n; ++j) A(i, j) -= f * A(k, j);
    }
  }
  return d;
}

}  // namespace

double det(const Mat& F) {
  if (!F.is_square()) throw ArgumentError("det: matrix must be square");
  return F.rows() <= 4 ? det_cofactor(F) : det_elimination(F);
}

Vec adjugate_vector(const Mat& F, std::size_t j, Axis axis) {
  if (!F.is_square()) throw ArgumentError("adjugate_vector: matrix must be square");
  const std::size_t n = F.rows();
  if (j >= n) throw ArgumentError("adjugate_vector: index out of range");
  Vec adj(n);
  if (n == 1) {
    adj[0] = 1.0;
    return adj;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t r = axis == Axis::Row ? j : k;
    const std::size_t c = axis == Axis::Row ? k : j;
    const double sign = ((r + c) % 2 == 0) ? 1.0 : -1.0;
    adj[k] = sign * det(delete_row_col(F, r, c));
  }
  return adj;
}

Vec rot2(std::span<const double> x) {
  if (x.size() != 2) throw ArgumentError("rot2: expected a 2-vector");
  return {-x[1], x[0]};
}

Vec rot_block(std::span<const double> x) {
  if (x.size() % 2 != 0) throw ArgumentError("rot_block: odd length");
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); i += 2) {
    out[i] = -x[i + 1];
    out[i + 1] = x[i];
  }
  return out;
}

Vec cross3(std::span<const double> u, std::span<const double> v) {
  if (u.size() != 3 || v.size() != 3) throw ArgumentError("cross3: expected 3-vectors");
  return {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
}

RankOneReport rank_one_defect(const Mat& A, double tol) {
  double worst = 0.0;
  for (std::size_t i1 = 0; i1 < A.rows(); ++i1)
    for (std::size_t i2 = i1 + 1; i2 < A.rows(); ++i2)
      for (std::size_t j1 = 0; j1 < A.cols(); ++j1)
        for (std::size_t j2 = j1 + 1; j2 < A.cols(); ++j2)
          worst = std::max(worst, std::abs(minor2(A, i1, i2, j1, j2)));
  const double m = A.max_abs();
  RankOneReport r;
  r.defect = worst / (1.0 + m * m);
  r.is_rank_le_one = r.defect <= tol;
  return r;
}

double block_det_sum(const Mat& F) {
  if (F.rows() != 2 || F.cols() % 2 != 0 || F.cols() == 0)
    throw ArgumentError("block_det_sum: expected a 2×2N matrix");
  double s = 0.0;
  for (std::size_t b = 0; b < F.cols(); b += 2) s += F(0, b) * F(1, b + 1) - F(0, b + 1) * F(1, b);
  return s;
}

Mat block2(const Mat& F, std::size_t i) {
  if (F.rows() != 2 || 2 * i + 2 > F.cols()) throw ArgumentError("block2: out of range");
  return F.col_block(2 * i, 2);
}

}  // namespace qcx
