#pragma once

#include <cstddef>
#include <vector>

#include "hgc/matrix.hpp"
#include "hgc/seed.hpp"

namespace hgc {

/// A Gaussian matrix together with its column-wise Gram–Schmidt
/// orthonormalization and the trace of the procedure.
///
/// `y` and `u` are n x k with k <= n. The square case k = n is the full
/// coupling (Y_n, U_n); k < n keeps only the first k columns, which is all
/// any statistic over the leading m <= k columns ever reads, because column
/// j of U depends on y_1..y_j alone.
///
/// `coefficients` is the k x k upper-triangular R with y_j = sum_{l<j} R(l,j) ν_l + R(j,j) ν_j,
/// R(l,j) = <y_j, ν_l> and R(j,j) = residual_norms[j] > 0.
struct CoupledPair {
  Matrix y;
  Matrix u;
  Matrix coefficients;
  std::vector<double> residual_norms;

  std::size_t n() const noexcept { return y.rows(); }
  std::size_t k() const noexcept { return y.cols(); }
};

/// The pair (Y', U') = (Y V, U V) of the randomized coupling.
struct RotatedPair {
  Matrix y;
  Matrix u;
};

/// i.i.d. N(0, 1) entries; column j is drawn from substream seed.child(j),
/// so sample_gaussian(n, k, s) is exactly the first k columns of
/// sample_gaussian(n, n, s).
Matrix sample_gaussian(std::size_t rows, std::size_t cols, const Seed& seed);

/// Residual norms below this abort Gram–Schmidt.
double degeneracy_threshold(std::size_t n) noexcept;

/// Gram–Schmidt of a square matrix. Throws DimensionError if `y` is not
/// square and DegeneracyError naming the first column whose residual falls
/// below degeneracy_threshold(n).
CoupledPair gram_schmidt_couple(const Matrix& y);

/// Same procedure on an n x k matrix, k <= n (leading-column coupling).
CoupledPair gram_schmidt_couple_columns(const Matrix& y);

/// k x k Haar orthogonal matrix: the Gram–Schmidt factor of
/// sample_gaussian(k, k, seed).
Matrix haar_orthogonal(std::size_t k, const Seed& seed);

/// Right-multiplies y and u by blockdiag(V_m, I) with V_m = haar_orthogonal(m, seed).
RotatedPair randomized_couple(const CoupledPair& pair, std::size_t m, const Seed& seed);

/// Same with an explicit m x m block (must be square; orthogonality is the caller's job).
RotatedPair randomized_couple(const CoupledPair& pair, const Matrix& rotation);

/// Numerical health of a coupling.
struct CouplingCheck {
  double orthogonality = 0.0;   ///< max |UᵀU - I|
  double reconstruction = 0.0;  ///< max_j ||y_j - U R_j|| / ||y_j||
  double min_residual = 0.0;
};

CouplingCheck check_coupling(const CoupledPair& pair);

}  // namespace hgc
