#include <doctest.h>

#include <cmath>
#include <limits>

#include "hgc/coupling.hpp"
#include "hgc/error.hpp"
#include "hgc/measure.hpp"

using hgc::Matrix;
using hgc::Seed;

TEST_CASE("hand examples") {
  SUBCASE("identity") {
    const auto p = hgc::gram_schmidt_couple(Matrix::identity(3));
    CHECK(p.u == Matrix::identity(3));
    CHECK(p.residual_norms == std::vector<double>{1, 1, 1});
  }
  SUBCASE("diag(2, 3)") {
    const auto p = hgc::gram_schmidt_couple(Matrix::from_rows({{2, 0}, {0, 3}}));
    CHECK(hgc::max_abs_diff(p.u, Matrix::identity(2)) == 0.0);
    CHECK(p.residual_norms[0] == doctest::Approx(2.0));
    CHECK(p.residual_norms[1] == doctest::Approx(3.0));
  }
  SUBCASE("columns (1,0), (1,1)") {
    const auto p = hgc::gram_schmidt_couple(Matrix::from_rows({{1, 1}, {0, 1}}));
    CHECK(hgc::max_abs_diff(p.u, Matrix::identity(2)) < 1e-15);
    CHECK(p.residual_norms[0] == doctest::Approx(1.0));
    CHECK(p.residual_norms[1] == doctest::Approx(1.0));
    CHECK(p.coefficients(0, 1) == doctest::Approx(1.0));
  }
  SUBCASE("negative leading entry keeps r_j > 0") {
    const auto p = hgc::gram_schmidt_couple(Matrix::from_rows({{-2, 0}, {0, -1}}));
    CHECK(p.u(0, 0) == doctest::Approx(-1.0));
    CHECK(p.u(1, 1) == doctest::Approx(-1.0));
    CHECK(p.residual_norms[0] == doctest::Approx(2.0));
  }
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(hgc::gram_schmidt_couple(Matrix(3, 2)), hgc::DimensionError);
  CHECK_THROWS_AS(hgc::gram_schmidt_couple_columns(Matrix(2, 3)), hgc::DimensionError);
  try {
    hgc::gram_schmidt_couple(Matrix::from_rows({{1, 2}, {1, 2}}));
    FAIL("expected DegeneracyError");
  } catch (const hgc::DegeneracyError& e) {
    CHECK(e.column() == 2);
  }
  Matrix bad = Matrix::identity(2);
  bad(0, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(hgc::gram_schmidt_couple(bad), hgc::NumericalError);
}

TEST_CASE("invariants on random instances") {
  for (std::size_t n : {1, 2, 7, 64, 65, 130, 300}) {
    CAPTURE(n);
    const auto p = hgc::gram_schmidt_couple(hgc::sample_gaussian(n, n, Seed(n)));
    const auto c = hgc::check_coupling(p);
    CHECK(c.orthogonality <= 1e-12);
    CHECK(c.reconstruction <= 1e-10);
    CHECK(c.min_residual > hgc::degeneracy_threshold(n));
    // <y_j, nu_j> = r_j > 0 and nu_j orthogonal to y_1..y_{j-1}
    const Eigen::MatrixXd yu = p.y.eigen().transpose() * p.u.eigen();
    for (std::size_t j = 0; j < n; ++j) {
      CHECK(yu(j, j) == doctest::Approx(p.residual_norms[j]).epsilon(1e-10));
      CHECK(p.residual_norms[j] > 0);
      for (std::size_t l = 0; l < j; ++l) CHECK(std::abs(yu(l, j)) <= 1e-10 * std::sqrt(double(n)));
    }
  }
}

TEST_CASE("ill-conditioned input stays orthogonal") {
  // columns nearly parallel: y_j = y_1 + 1e-6 g_j
  const std::size_t n = 200;
  Matrix y = hgc::sample_gaussian(n, n, Seed(31));
  for (std::size_t j = 1; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) y(i, j) = y(i, 0) + 1e-6 * y(i, j);
  const auto p = hgc::gram_schmidt_couple(y);
  const auto c = hgc::check_coupling(p);
  CHECK(c.orthogonality <= 1e-12);
  CHECK(c.reconstruction <= 1e-10);
}

TEST_CASE("thin coupling is the prefix of the square one") {
  const std::size_t n = 150;
  const Matrix y = hgc::sample_gaussian(n, n, Seed(4));
  const auto full = hgc::gram_schmidt_couple(y);
  const auto thin = hgc::gram_schmidt_couple_columns(y.left_cols(70));
  CHECK(hgc::max_abs_diff(thin.u, full.u.left_cols(70)) < 1e-13);
  for (std::size_t j = 0; j < 70; ++j) {
    CHECK(thin.residual_norms[j] == doctest::Approx(full.residual_norms[j]).epsilon(1e-13));
  }
}

TEST_CASE("sign convention differs from raw Householder QR") {
  // Eigen's Householder QR returns R with arbitrary-signed diagonal; the
  // coupling must agree with it only after flipping columns to r_jj > 0.
  const std::size_t n = 40;
  const Matrix y = hgc::sample_gaussian(n, n, Seed(8));
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y.eigen());
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  int negative = 0;
  for (Eigen::Index j = 0; j < r.cols(); ++j) {
    if (r(j, j) < 0) {
      q.col(j) *= -1;
      ++negative;
    }
  }
  CHECK(negative > 0);
  const auto p = hgc::gram_schmidt_couple(y);
  CHECK((q - p.u.eigen()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("orthogonality at n = 2048") {
  const std::size_t n = 2048;
  const auto p = hgc::gram_schmidt_couple(hgc::sample_gaussian(n, n, Seed(2048)));
  const auto c = hgc::check_coupling(p);
  CHECK(c.orthogonality <= 1e-10);
  CHECK(c.reconstruction <= 1e-10);
}

TEST_CASE("chi law of residual norms") {
  const std::size_t n = 256, trials = 200;
  const std::size_t js[] = {1, n / 2, n - 1};
  double sum[3] = {0, 0, 0};
  for (std::size_t t = 0; t < trials; ++t) {
    const auto p = hgc::gram_schmidt_couple(hgc::sample_gaussian(n, n, Seed(99, {t})));
    for (int k = 0; k < 3; ++k) {
      const double r = p.residual_norms[js[k] - 1];
      sum[k] += r * r;
    }
  }
  for (int k = 0; k < 3; ++k) {
    const double dof = double(n - js[k] + 1);
    CAPTURE(js[k]);
    CHECK(std::abs(sum[k] / trials - dof) <= 5 * std::sqrt(2 * dof / trials));
  }
}

TEST_CASE("haar_orthogonal") {
  CHECK(hgc::orthogonality_error(hgc::haar_orthogonal(4, Seed(1))) <= 1e-12);
  CHECK(hgc::haar_orthogonal(5, Seed(2)) == hgc::haar_orthogonal(5, Seed(2)));
  int plus = 0;
  for (std::uint64_t s = 0; s < 10000; ++s) {
    const double v = hgc::haar_orthogonal(1, Seed(s))(0, 0);
    CHECK(std::abs(v) == 1.0);
    plus += v > 0;
  }
  CHECK(plus >= 4700);
  CHECK(plus <= 5300);
  double mean = 0;
  for (std::uint64_t s = 0; s < 1000; ++s) mean += hgc::haar_orthogonal(64, Seed(s, {1}))(0, 0);
  CHECK(std::abs(mean / 1000) <= 0.02);
}

TEST_CASE("randomized coupling") {
  const std::size_t n = 96;
  const auto pair = hgc::gram_schmidt_couple(hgc::sample_gaussian(n, n, Seed(12)));
  SUBCASE("identity rotation at m = n") {
    const auto r = hgc::randomized_couple(pair, Matrix::identity(n));
    CHECK(r.y == pair.y);
    CHECK(r.u == pair.u);
  }
  SUBCASE("block structure and row norms") {
    const std::size_t m = 30;
    const auto r = hgc::randomized_couple(pair, m, Seed(13));
    for (std::size_t j = m; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(r.y(i, j) == pair.y(i, j));
        CHECK(r.u(i, j) == pair.u(i, j));
      }
    CHECK(hgc::orthogonality_error(r.u) <= 1e-12);
    const auto before = hgc::truncated_row_norms(pair.y, pair.u, m);
    const auto after = hgc::truncated_row_norms(r.y, r.u, m);
    for (std::size_t i = 0; i < n; ++i) CHECK(after[i] == doctest::Approx(before[i]).epsilon(1e-12));
  }
  SUBCASE("bad shapes") {
    CHECK_THROWS_AS(hgc::randomized_couple(pair, Matrix(3, 2)), hgc::DimensionError);
    CHECK_THROWS_AS(hgc::randomized_couple(pair, n + 1, Seed(1)), hgc::DimensionError);
  }
}
