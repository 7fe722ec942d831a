#include <cmath>
#include <string>
#include <vector>

#include "hgc/coupling.hpp"
#include "hgc/harness.hpp"
#include "hgc/theory.hpp"

namespace hgc {

namespace {

BoundCheck upper_check(std::string name, std::string params, double bound, std::size_t hits,
                       std::size_t samples) {
  BoundCheck c;
  c.name = std::move(name);
  c.parameters = std::move(params);
  c.bound = bound;
  c.samples = samples;
  c.empirical = static_cast<double>(hits) / static_cast<double>(samples);
  c.holds = c.empirical <= c.bound;
  return c;
}

}  // namespace

std::vector<BoundCheck> run_bound_checks(std::uint64_t seed) {
  std::vector<BoundCheck> out;

  {  // Mills-ratio bounds on P(Z > 1).
    constexpr std::size_t kSamples = 100000;
    const double t = 1.0;
    Stream stream(Seed(seed, {0}));
    std::size_t hits = 0;
    for (std::size_t s = 0; s < kSamples; ++s) hits += stream.gaussian() > t;
    const theory::Interval b = theory::gaussian_tail_bounds(t);
    BoundCheck c = upper_check("gaussian_tail", "t=1", b.upper, hits, kSamples);
    c.lower_bound = b.lower;
    c.holds = b.lower <= c.empirical && c.empirical <= b.upper;
    out.push_back(c);
  }

  {  // Norm of a Gaussian vector, both directions.
    constexpr std::size_t kSamples = 100000;
    constexpr std::size_t n = 400;
    const double eps = 0.2;
    const double hi = std::sqrt(static_cast<double>(n) / (1.0 - eps));
    const double lo = std::sqrt(static_cast<double>(n) * (1.0 - eps));
    Stream stream(Seed(seed, {1}));
    std::size_t above = 0, below = 0;
    for (std::size_t s = 0; s < kSamples; ++s) {
      double sq = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double g = stream.gaussian();
        sq += g * g;
      }
      const double norm = std::sqrt(sq);
      above += norm >= hi;
      below += norm <= lo;
    }
    const double bound = theory::chi_norm_tail(n, eps);
    out.push_back(upper_check("chi_norm_above", "n=400,eps=0.2", bound, above, kSamples));
    out.push_back(upper_check("chi_norm_below", "n=400,eps=0.2", bound, below, kSamples));
  }

  {  // Projections onto a Haar k-dimensional subspace of R^n.
    constexpr std::size_t kSamples = 10000;
    constexpr std::size_t n = 256, k = 64;
    const double rho = 0.3, t = 1.5;
    const double kd = static_cast<double>(k);
    const double unit_scale = std::sqrt(kd / static_cast<double>(n));
    std::size_t g_above = 0, g_below = 0, u_above = 0, u_below = 0, u_far = 0;
    for (std::size_t s = 0; s < kSamples; ++s) {
      const Seed sample_seed(seed, {2, s});
      // L = span of k Gaussian columns, i.e. of the first k columns of a Haar U.
      const Matrix basis = gram_schmidt_couple_columns(sample_gaussian(n, k, sample_seed.child(0))).u;
      const Matrix x = sample_gaussian(n, 1, sample_seed.child(1));
      const double gx = (basis.eigen().transpose() * x.eigen()).norm();
      const double ue = basis.eigen().row(0).norm();
      g_above += gx >= std::sqrt(kd / (1.0 - rho));
      g_below += gx <= std::sqrt(kd * (1.0 - rho));
      u_above += ue >= unit_scale / (1.0 - rho);
      u_below += ue <= (1.0 - rho) * unit_scale;
      u_far += ue >= t * unit_scale;
    }
    const theory::ProjectionTails b = theory::projection_tails(k, n, rho, t);
    const std::string params = "k=64,n=256,rho=0.3";
    out.push_back(upper_check("subspace_gaussian_above", params, b.gaussian_above, g_above, kSamples));
    out.push_back(upper_check("subspace_gaussian_below", params, b.gaussian_below, g_below, kSamples));
    out.push_back(upper_check("subspace_unit_above", params, b.unit_above, u_above, kSamples));
    out.push_back(upper_check("subspace_unit_below", params, b.unit_below, u_below, kSamples));
    out.push_back(upper_check("subspace_unit_far", params + ",t=1.5", *b.unit_far, u_far, kSamples));
  }

  {  // Hoeffding for a sum of 100 Uniform(-1, 1) variables.
    constexpr std::size_t kSamples = 10000;
    constexpr std::size_t terms = 100;
    const double a = 20.0;
    const std::vector<double> widths(terms, 2.0);
    Stream stream(Seed(seed, {3}));
    std::size_t hits = 0;
    for (std::size_t s = 0; s < kSamples; ++s) {
      double sum = 0.0;
      for (std::size_t i = 0; i < terms; ++i) sum += 2.0 * stream.uniform() - 1.0;
      hits += std::abs(sum) > a;
    }
    out.push_back(upper_check("hoeffding", "terms=100,width=2,a=20",
                              theory::hoeffding_bound(widths, a), hits, kSamples));
  }
  return out;
}

}  // namespace hgc
