#include "hgc/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hgc/error.hpp"
#include "hgc/theory.hpp"

namespace hgc {

namespace {

void require_block(const Matrix& y, const Matrix& u, std::size_t m) {
  if (y.rows() != u.rows() || y.cols() != u.cols()) {
    throw DimensionError("y and u must have the same shape");
  }
  if (m == 0 || m > y.cols()) {
    throw DimensionError("m = " + std::to_string(m) + " outside [1, " + std::to_string(y.cols()) +
                         "]");
  }
}

Eigen::MatrixXd difference_block(const Matrix& y, const Matrix& u, std::size_t m) {
  const auto mm = static_cast<Eigen::Index>(m);
  const double root_n = std::sqrt(static_cast<double>(y.rows()));
  return y.eigen().leftCols(mm) - root_n * u.eigen().leftCols(mm);
}

std::vector<double> to_vector(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

}  // namespace

std::string_view to_string(CouplingKind kind) {
  return kind == CouplingKind::plain_gs ? "plain-gs" : "randomized";
}

CouplingKind parse_coupling_kind(std::string_view name) {
  if (name == "plain-gs") return CouplingKind::plain_gs;
  if (name == "randomized") return CouplingKind::randomized;
  throw ConfigError("unknown coupling '" + std::string(name) + "'");
}

std::vector<double> truncated_row_norms(const Matrix& y, const Matrix& u, std::size_t m) {
  require_block(y, u, m);
  return to_vector(difference_block(y, u, m).rowwise().norm());
}

std::vector<double> column_norms_squared(const Matrix& y, const Matrix& u, std::size_t m) {
  require_block(y, u, m);
  return to_vector(difference_block(y, u, m).colwise().squaredNorm().transpose());
}

RowBlockDecomposition decompose_gh(const CoupledPair& pair, std::size_t m) {
  require_block(pair.y, pair.u, m);
  const auto mm = static_cast<Eigen::Index>(m);
  const double root_n = std::sqrt(static_cast<double>(pair.n()));
  const auto nu = pair.u.eigen().leftCols(mm);

  // G = U_m * strict_upper(R_m): column j sums <y_j, ν_l> ν_l over l < j.
  Eigen::MatrixXd g(nu.rows(), mm);
  g.noalias() = nu * pair.coefficients.eigen()
                         .topLeftCorner(mm, mm)
                         .triangularView<Eigen::StrictlyUpper>();

  Eigen::VectorXd scale(mm);
  for (Eigen::Index j = 0; j < mm; ++j) {
    scale(j) = pair.residual_norms[static_cast<std::size_t>(j)] - root_n;
  }
  Eigen::MatrixXd h = nu * scale.asDiagonal();

  RowBlockDecomposition out{pair.n(),
                            m,
                            static_cast<double>(m) / static_cast<double>(pair.n()),
                            truncated_row_norms(pair.y, pair.u, m),
                            to_vector(g.rowwise().norm()),
                            to_vector(h.rowwise().norm()),
                            to_vector(g.cwiseProduct(h).rowwise().sum()),
                            Matrix(std::move(g)),
                            Matrix(std::move(h))};
  return out;
}

SupStatistic epsilon_sup(const Matrix& y, const Matrix& u, std::size_t m, CouplingKind coupling,
                         std::optional<double> beta) {
  require_block(y, u, m);
  return {difference_block(y, u, m).cwiseAbs().maxCoeff(), y.rows(), m, beta, coupling};
}

double ks_statistic(std::span<const double> samples) {
  if (samples.empty()) throw DomainError("ks_statistic: no samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double count = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double cdf = theory::normal_cdf(sorted[i]);
    const double below = static_cast<double>(i) / count;
    const double above = static_cast<double>(i + 1) / count;
    d = std::max({d, above - cdf, cdf - below});
  }
  return d;
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw DomainError("quantile: no values");
  const double h = static_cast<double>(sorted.size() - 1) * std::clamp(p, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return quantile_sorted(values, 0.5);
}

Summary summarize(std::span<const double> values) {
  if (values.empty()) throw DomainError("summarize: no values");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double count = static_cast<double>(sorted.size());

  Summary s;
  s.inf = sorted.front();
  s.sup = sorted.back();
  if (s.inf == s.sup) {
    s.mean = s.q05 = s.q50 = s.q95 = s.inf;
    return s;
  }
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / count;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / (count - 1.0));
  s.q05 = quantile_sorted(sorted, 0.05);
  s.q50 = quantile_sorted(sorted, 0.50);
  s.q95 = quantile_sorted(sorted, 0.95);
  return s;
}

}  // namespace hgc
