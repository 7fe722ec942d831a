#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>

#include <Eigen/Dense>

namespace hgc {

/// Dense real matrix, column-major. Indices are 0-based in code; the CSV/JSON
/// layouts written by the harness use 1-based (i, j).
///
/// Columns are the unit of work for Gram–Schmidt, so `col(j)` hands out a
/// contiguous span. Storage is an Eigen matrix; `eigen()` exposes it to the
/// kernels that need GEMM.
class Matrix {
 public:
  /// Zero-filled rows x cols matrix. Throws DimensionError if either is 0.
  Matrix(std::size_t rows, std::size_t cols);
  explicit Matrix(Eigen::MatrixXd data);

  /// Row-major literal, handy in tests: Matrix::from_rows({{1, 1}, {0, 1}}).
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return static_cast<std::size_t>(data_.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(data_.cols()); }
  bool square() const noexcept { return data_.rows() == data_.cols(); }

  double operator()(std::size_t i, std::size_t j) const {
    return data_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  double& operator()(std::size_t i, std::size_t j) {
    return data_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

  std::span<const double> col(std::size_t j) const;
  std::span<double> col(std::size_t j);

  /// First `count` columns as a new matrix.
  Matrix left_cols(std::size_t count) const;

  const Eigen::MatrixXd& eigen() const noexcept { return data_; }
  Eigen::MatrixXd& eigen() noexcept { return data_; }

  bool all_finite() const;

  /// Bitwise equality of shape and entries.
  friend bool operator==(const Matrix& a, const Matrix& b);

 private:
  Eigen::MatrixXd data_;
};

/// max |a_ij - b_ij|; shapes must agree.
double max_abs_diff(const Matrix& a, const Matrix& b);

/// max |(QᵀQ - I)_ij| for an n x k matrix with orthonormal columns.
double orthogonality_error(const Matrix& q);

Matrix multiply(const Matrix& a, const Matrix& b);

}  // namespace hgc
