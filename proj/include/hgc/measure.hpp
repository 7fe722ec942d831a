#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "hgc/coupling.hpp"
#include "hgc/matrix.hpp"

namespace hgc {

enum class CouplingKind { plain_gs, randomized };

std::string_view to_string(CouplingKind kind);
/// Throws ConfigError on unknown names.
CouplingKind parse_coupling_kind(std::string_view name);

/// Row-block split of F = Y - sqrt(n) U over the first m columns into
/// G (projection parts Δ_j) and H (residual rescaling parts Δ'_j).
struct RowBlockDecomposition {
  std::size_t n = 0;
  std::size_t m = 0;
  double alpha = 0.0;
  std::vector<double> f_norms;  ///< ||F_i^m||, from Y - sqrt(n) U directly
  std::vector<double> g_norms;
  std::vector<double> h_norms;
  std::vector<double> cross;  ///< <G_i^m, H_i^m>
  Matrix g;                   ///< n x m, column j = sum_{l<j} <y_j, ν_l> ν_l
  Matrix h;                   ///< n x m, column j = (r_j - sqrt(n)) ν_j
};

struct SupStatistic {
  double eps = 0.0;
  std::size_t n = 0;
  std::size_t m = 0;
  std::optional<double> beta;
  CouplingKind coupling = CouplingKind::plain_gs;
};

/// ||(y_ij - sqrt(n) u_ij)_{j<m}|| for every row i. y and u are n x k with
/// equal shapes and 1 <= m <= k; sqrt(n) uses the row count.
std::vector<double> truncated_row_norms(const Matrix& y, const Matrix& u, std::size_t m);

/// Squared norms of the first m columns of Y - sqrt(n) U.
std::vector<double> column_norms_squared(const Matrix& y, const Matrix& u, std::size_t m);

RowBlockDecomposition decompose_gh(const CoupledPair& pair, std::size_t m);

/// max |y_ij - sqrt(n) u_ij| over the n x m block.
SupStatistic epsilon_sup(const Matrix& y, const Matrix& u, std::size_t m,
                         CouplingKind coupling = CouplingKind::plain_gs,
                         std::optional<double> beta = std::nullopt);

/// Kolmogorov–Smirnov distance sup_x |F_n(x) - Φ(x)| against N(0, 1).
/// Throws DomainError on empty input.
double ks_statistic(std::span<const double> samples);

struct Summary {
  double sup = 0.0;
  double inf = 0.0;
  double mean = 0.0;
  double std = 0.0;  ///< sample standard deviation (n - 1); 0 for one value
  double q05 = 0.0;
  double q50 = 0.0;
  double q95 = 0.0;
};

/// Quantile by linear interpolation between order statistics: with sorted
/// x_0..x_{N-1}, h = (N - 1) p and q = x_⌊h⌋ + (h - ⌊h⌋)(x_⌊h⌋+1 - x_⌊h⌋),
/// clamped to [x_0, x_{N-1}].
double quantile_sorted(std::span<const double> sorted, double p);

double median(std::vector<double> values);

/// Throws DomainError on empty input.
Summary summarize(std::span<const double> values);

}  // namespace hgc
