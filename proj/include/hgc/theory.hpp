#pragma once

#include <cstddef>
#include <optional>
#include <span>

namespace hgc::theory {

/// Limit profile of squared truncated row norms per unit m:
/// phi(a) = 2 - (4/3) (1 - (1 - a)^{3/2}) / a on (0, 1].
///
/// Evaluated as 2a(1 + 2s) / (3(1 + s)^2), s = sqrt(1 - a), which is the
/// same expression with the cancellation removed; below kPhiSeriesSwitch
/// the Taylor polynomial a/2 + a^2/12 + a^3/32 is used instead.
/// Throws DomainError outside (0, 1].
double phi(double alpha);

inline constexpr double kPhiSeriesSwitch = 1e-4;

/// Exponent of the lower-order corrections. Carried as metadata only.
inline constexpr double kCorrectionExponent = 0.4;

/// sqrt(phi(m/n) m); tends to m / sqrt(2n) as m/n -> 0. Requires 1 <= m <= n.
double predicted_row_norm(std::size_t n, std::size_t m);

struct Interval {
  double lower;
  double upper;
};

/// Mills-ratio bounds on P(Z > t) for standard normal Z, t > 0:
/// t e^{-t²/2} / ((1 + t²) sqrt(2π)) <= P(Z > t) <= e^{-t²/2} / (t sqrt(2π)).
Interval gaussian_tail_bounds(double t);

/// e^{-eps² n / 4}: bounds each of P(||x|| >= sqrt(n)/sqrt(1-eps)) and
/// P(||x|| <= sqrt(n) sqrt(1-eps)) for a Gaussian x in R^n. Needs 0 < eps < 1.
double chi_norm_tail(std::size_t n, double eps);

/// Projection of a Gaussian vector / a fixed unit vector onto a Haar
/// k-dimensional subspace of R^n.
struct ProjectionTails {
  double gaussian_above;  ///< P(||P_L x|| >= sqrt(k)/sqrt(1-eps))
  double gaussian_below;  ///< P(||P_L x|| <= sqrt(k) sqrt(1-eps))
  double unit_above;      ///< P(||P_L y|| >= sqrt(k/n)/(1-rho))
  double unit_below;      ///< P(||P_L y|| <= (1-rho) sqrt(k/n))
  std::optional<double> unit_far;  ///< P(||P_L y|| >= t sqrt(k/n)), t > 1
};

ProjectionTails projection_tails(std::size_t k, std::size_t n, double rho,
                                 std::optional<double> t = std::nullopt);

/// Hoeffding: 2 exp(-2a² / sum w_i²) for independent X_i with ranges of width w_i.
double hoeffding_bound(std::span<const double> widths, double a);

/// Leading-order window for eps_n(m) under the randomized coupling:
/// lower = (1-slack) sqrt(phi) sqrt(2 ln n), upper = (1+slack) sqrt(phi) sqrt(2 ln(nm)).
/// The O(m^{-delta}) corrections are omitted.
Interval epsilon_envelope(std::size_t n, std::size_t m, double slack);

/// (sqrt(beta), sqrt(2 beta)): limit window for eps_n(m) when m = [beta n / ln n].
Interval beta_interval(double beta);

/// Thresholds for the sup-norm of m uniform unit vectors in R^n:
/// upper = (1+slack) sqrt(2 ln(nm)) / sqrt(n), lower = (1-slack) sqrt(2 ln n) / sqrt(n).
Interval sphere_sup_threshold(std::size_t n, std::size_t m, double slack);

/// All closed-form predictions for one (n, m).
struct TheoryEnvelope {
  std::size_t n = 0;
  std::size_t m = 0;
  double alpha = 0.0;
  double phi = 0.0;
  double row_norm_target = 0.0;
  double eps_lower = 0.0;
  double eps_upper = 0.0;
  double slack = 0.0;
  double correction_exponent = kCorrectionExponent;
};

TheoryEnvelope envelope(std::size_t n, std::size_t m, double slack = 0.0);

/// Standard normal CDF.
double normal_cdf(double x);

}  // namespace hgc::theory
