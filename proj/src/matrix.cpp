#include "hgc/matrix.hpp"

#include <string>
#include <utility>

#include "hgc/error.hpp"

namespace hgc {

namespace {

void require_positive(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) {
    throw DimensionError("matrix dimensions must be positive, got " + std::to_string(rows) +
                         "x" + std::to_string(cols));
  }
}

void require_same_shape(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("shape mismatch: " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()));
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols) {
  require_positive(rows, cols);
  data_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

Matrix::Matrix(Eigen::MatrixXd data) : data_(std::move(data)) {
  require_positive(rows(), cols());
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  Matrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) throw DimensionError("ragged matrix literal");
    std::size_t j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

Matrix Matrix::identity(std::size_t n) {
  require_positive(n, n);
  const auto k = static_cast<Eigen::Index>(n);
  return Matrix(Eigen::MatrixXd::Identity(k, k));
}

std::span<const double> Matrix::col(std::size_t j) const {
  if (j >= cols()) throw DimensionError("column index out of range");
  return {data_.data() + j * rows(), rows()};
}

std::span<double> Matrix::col(std::size_t j) {
  if (j >= cols()) throw DimensionError("column index out of range");
  return {data_.data() + j * rows(), rows()};
}

Matrix Matrix::left_cols(std::size_t count) const {
  if (count == 0 || count > cols()) throw DimensionError("column prefix out of range");
  return Matrix(Eigen::MatrixXd(data_.leftCols(static_cast<Eigen::Index>(count))));
}

bool Matrix::all_finite() const { return data_.allFinite(); }

bool operator==(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  const double* pa = a.data_.data();
  const double* pb = b.data_.data();
  const std::size_t count = a.rows() * a.cols();
  for (std::size_t k = 0; k < count; ++k) {
    if (pa[k] != pb[k]) return false;
  }
  return true;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b);
  return (a.eigen() - b.eigen()).cwiseAbs().maxCoeff();
}

double orthogonality_error(const Matrix& q) {
  const auto k = static_cast<Eigen::Index>(q.cols());
  Eigen::MatrixXd gram(k, k);
  gram.setZero();
  gram.selfadjointView<Eigen::Lower>().rankUpdate(q.eigen().transpose());
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
  gram.diagonal().array() -= 1.0;
  return gram.cwiseAbs().maxCoeff();
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("inner dimensions differ in multiply");
  Eigen::MatrixXd out(a.eigen().rows(), b.eigen().cols());
  out.noalias() = a.eigen() * b.eigen();
  return Matrix(std::move(out));
}

}  // namespace hgc
