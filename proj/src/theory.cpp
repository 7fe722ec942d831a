#include "hgc/theory.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "hgc/error.hpp"

namespace hgc::theory {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw DomainError(what);
}

const double kSqrt2Pi = std::sqrt(2.0 * std::numbers::pi);

}  // namespace

double phi(double alpha) {
  require(alpha > 0.0 && alpha <= 1.0, "phi: alpha must lie in (0, 1]");
  if (alpha < kPhiSeriesSwitch) {
    return alpha * (0.5 + alpha * (1.0 / 12.0 + alpha / 32.0));
  }
  const double s = std::sqrt(1.0 - alpha);
  return 2.0 * alpha * (1.0 + 2.0 * s) / (3.0 * (1.0 + s) * (1.0 + s));
}

double predicted_row_norm(std::size_t n, std::size_t m) {
  require(m >= 1 && m <= n, "predicted_row_norm: need 1 <= m <= n");
  const double alpha = static_cast<double>(m) / static_cast<double>(n);
  return std::sqrt(phi(alpha) * static_cast<double>(m));
}

Interval gaussian_tail_bounds(double t) {
  require(t > 0.0, "gaussian_tail_bounds: t must be positive");
  const double density = std::exp(-0.5 * t * t) / kSqrt2Pi;
  return {t * density / (1.0 + t * t), density / t};
}

double chi_norm_tail(std::size_t n, double eps) {
  require(n >= 1, "chi_norm_tail: n must be positive");
  require(eps > 0.0 && eps < 1.0, "chi_norm_tail: eps must lie in (0, 1)");
  return std::exp(-eps * eps * static_cast<double>(n) / 4.0);
}

ProjectionTails projection_tails(std::size_t k, std::size_t n, double rho,
                                 std::optional<double> t) {
  require(k >= 1 && k <= n, "projection_tails: need 1 <= k <= n");
  require(rho > 0.0 && rho < 1.0, "projection_tails: rho must lie in (0, 1)");
  require(!t || *t > 1.0, "projection_tails: t must exceed 1");
  const double kd = static_cast<double>(k);
  const double two_sided = std::exp(-rho * rho * kd / 4.0);
  ProjectionTails out{two_sided, two_sided, two_sided, two_sided, std::nullopt};
  if (t) out.unit_far = std::exp(-(kd / 4.0) * (*t * *t - 2.0));
  return out;
}

double hoeffding_bound(std::span<const double> widths, double a) {
  require(a > 0.0, "hoeffding_bound: a must be positive");
  double sum_sq = 0.0;
  for (double w : widths) {
    require(w >= 0.0, "hoeffding_bound: widths must be non-negative");
    sum_sq += w * w;
  }
  require(sum_sq > 0.0, "hoeffding_bound: widths must not all be zero");
  return 2.0 * std::exp(-2.0 * a * a / sum_sq);
}

Interval epsilon_envelope(std::size_t n, std::size_t m, double slack) {
  require(n >= 2 && m >= 1 && m <= n, "epsilon_envelope: need n >= 2 and 1 <= m <= n");
  require(slack >= 0.0, "epsilon_envelope: slack must be non-negative");
  const double nd = static_cast<double>(n);
  const double root_phi = std::sqrt(phi(static_cast<double>(m) / nd));
  return {(1.0 - slack) * root_phi * std::sqrt(2.0 * std::log(nd)),
          (1.0 + slack) * root_phi * std::sqrt(2.0 * std::log(nd * static_cast<double>(m)))};
}

Interval beta_interval(double beta) {
  require(beta > 0.0, "beta_interval: beta must be positive");
  return {std::sqrt(beta), std::sqrt(2.0 * beta)};
}

Interval sphere_sup_threshold(std::size_t n, std::size_t m, double slack) {
  require(n >= 2 && m >= 1, "sphere_sup_threshold: need n >= 2 and m >= 1");
  require(slack >= 0.0 && slack < 1.0, "sphere_sup_threshold: slack must lie in [0, 1)");
  const double nd = static_cast<double>(n);
  const double root_n = std::sqrt(nd);
  return {(1.0 - slack) * std::sqrt(2.0 * std::log(nd)) / root_n,
          (1.0 + slack) * std::sqrt(2.0 * std::log(nd * static_cast<double>(m))) / root_n};
}

TheoryEnvelope envelope(std::size_t n, std::size_t m, double slack) {
  TheoryEnvelope env;
  env.n = n;
  env.m = m;
  env.alpha = static_cast<double>(m) / static_cast<double>(n);
  env.phi = phi(env.alpha);
  env.row_norm_target = predicted_row_norm(n, m);
  env.slack = slack;
  if (n >= 2) {
    const Interval eps = epsilon_envelope(n, m, slack);
    env.eps_lower = eps.lower;
    env.eps_upper = eps.upper;
  }
  return env;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace hgc::theory
