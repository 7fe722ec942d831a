#include "hgc/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "hgc/error.hpp"

namespace hgc {

namespace {

// Columns per block of the two-pass block Gram–Schmidt. Large enough for the
// projections to run as GEMM, small enough that the in-block GEMV work stays
// a small fraction of the total.
constexpr Eigen::Index kBlock = 64;

}  // namespace

Matrix sample_gaussian(std::size_t rows, std::size_t cols, const Seed& seed) {
  if (rows == 0 || cols == 0) {
    throw DimensionError("sample_gaussian: dimensions must be positive");
  }
  Matrix out(rows, cols);
  for (std::size_t j = 0; j < cols; ++j) {
    Stream stream(seed.child(j));
    for (double& v : out.col(j)) v = stream.gaussian();
  }
  return out;
}

double degeneracy_threshold(std::size_t n) noexcept {
  return 1e-8 * std::sqrt(static_cast<double>(n));
}

CoupledPair gram_schmidt_couple(const Matrix& y) {
  if (!y.square()) {
    throw DimensionError("gram_schmidt_couple: matrix must be square, got " +
                         std::to_string(y.rows()) + "x" + std::to_string(y.cols()));
  }
  return gram_schmidt_couple_columns(y);
}

// Two-pass block classical Gram–Schmidt (BCGS2). Each block is projected
// twice against all earlier ν's, then orthonormalized column by column with
// two classical passes against the earlier columns of the same block. In
// exact arithmetic every ν_j is (y_j - P_{L_{j-1}} y_j) / r_j, the plain
// Gram–Schmidt vector, with r_j > 0.
CoupledPair gram_schmidt_couple_columns(const Matrix& y) {
  const std::size_t n = y.rows();
  const std::size_t k = y.cols();
  if (k > n) {
    throw DimensionError("gram_schmidt_couple: more columns (" + std::to_string(k) +
                         ") than rows (" + std::to_string(n) + ")");
  }
  const double threshold = degeneracy_threshold(n);
  const auto kk = static_cast<Eigen::Index>(k);

  Eigen::MatrixXd q = y.eigen();
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(kk, kk);
  std::vector<double> residuals(k);

  Eigen::MatrixXd c;
  Eigen::VectorXd coef;
  for (Eigen::Index b0 = 0; b0 < kk; b0 += kBlock) {
    const Eigen::Index bs = std::min(kBlock, kk - b0);
    auto block = q.middleCols(b0, bs);
    if (b0 > 0) {
      const auto done = q.leftCols(b0);
      for (int pass = 0; pass < 2; ++pass) {
        c.noalias() = done.transpose() * block;
        block.noalias() -= done * c;
        r.block(0, b0, b0, bs) += c;
      }
    }
    for (Eigen::Index c0 = 0; c0 < bs; ++c0) {
      const Eigen::Index j = b0 + c0;
      auto w = q.col(j);
      if (c0 > 0) {
        const auto prev = q.middleCols(b0, c0);
        for (int pass = 0; pass < 2; ++pass) {
          coef.noalias() = prev.transpose() * w;
          w.noalias() -= prev * coef;
          r.col(j).segment(b0, c0) += coef;
        }
      }
      const double norm = w.norm();
      if (!(norm >= threshold)) {
        throw DegeneracyError(static_cast<std::size_t>(j) + 1, norm, threshold);
      }
      w /= norm;
      r(j, j) = norm;
      residuals[static_cast<std::size_t>(j)] = norm;
    }
  }

  return CoupledPair{y, Matrix(std::move(q)), Matrix(std::move(r)), std::move(residuals)};
}

Matrix haar_orthogonal(std::size_t k, const Seed& seed) {
  if (k == 0) throw DimensionError("haar_orthogonal: k must be positive");
  return gram_schmidt_couple(sample_gaussian(k, k, seed)).u;
}

RotatedPair randomized_couple(const CoupledPair& pair, std::size_t m, const Seed& seed) {
  if (m == 0 || m > pair.k()) {
    throw DimensionError("randomized_couple: m = " + std::to_string(m) + " outside [1, " +
                         std::to_string(pair.k()) + "]");
  }
  return randomized_couple(pair, haar_orthogonal(m, seed));
}

RotatedPair randomized_couple(const CoupledPair& pair, const Matrix& rotation) {
  const std::size_t m = rotation.rows();
  if (!rotation.square() || m > pair.k()) {
    throw DimensionError("randomized_couple: rotation block must be square with m <= " +
                         std::to_string(pair.k()));
  }
  const auto mm = static_cast<Eigen::Index>(m);
  RotatedPair out{pair.y, pair.u};
  out.y.eigen().leftCols(mm).noalias() = pair.y.eigen().leftCols(mm) * rotation.eigen();
  out.u.eigen().leftCols(mm).noalias() = pair.u.eigen().leftCols(mm) * rotation.eigen();
  return out;
}

CouplingCheck check_coupling(const CoupledPair& pair) {
  CouplingCheck check;
  check.orthogonality = orthogonality_error(pair.u);
  const Eigen::MatrixXd rebuilt =
      pair.u.eigen() * pair.coefficients.eigen().triangularView<Eigen::Upper>();
  const Eigen::MatrixXd diff = pair.y.eigen() - rebuilt;
  for (Eigen::Index j = 0; j < diff.cols(); ++j) {
    check.reconstruction =
        std::max(check.reconstruction, diff.col(j).norm() / pair.y.eigen().col(j).norm());
  }
  check.min_residual = *std::min_element(pair.residual_norms.begin(), pair.residual_norms.end());
  return check;
}

}  // namespace hgc
