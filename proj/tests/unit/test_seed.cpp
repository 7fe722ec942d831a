#include <doctest.h>

#include <cmath>
#include <set>

#include "hgc/coupling.hpp"
#include "hgc/seed.hpp"

using hgc::Seed;
using hgc::Stream;

TEST_CASE("key is a pure function of root and path") {
  CHECK(Seed(7, {1, 2}).key() == Seed(7, {1, 2}).key());
  CHECK(Seed(7).child(1).child(2) == Seed(7, {1, 2}));
  std::set<std::uint64_t> keys;
  for (std::uint64_t root : {0ULL, 1ULL, 7ULL})
    for (std::uint64_t a = 0; a < 20; ++a) {
      keys.insert(Seed(root, {a}).key());
      for (std::uint64_t b = 0; b < 20; ++b) keys.insert(Seed(root, {a, b}).key());
    }
  keys.insert(Seed(0).key());
  keys.insert(Seed(0, {0, 0, 0}).key());
  CHECK(keys.size() == 3 * (20 + 400) + 2);
  // path length is part of the key
  CHECK(Seed(3, {0}).key() != Seed(3, {0, 0}).key());
}

TEST_CASE("stream reproducibility") {
  Stream a(Seed(11, {4})), b(Seed(11, {4}));
  for (int i = 0; i < 100; ++i) CHECK(a.gaussian() == b.gaussian());
  Stream u(Seed(1));
  for (int i = 0; i < 1000; ++i) {
    const double x = u.uniform();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
}

TEST_CASE("gaussian moments over 1e6 draws") {
  const hgc::Matrix x = hgc::sample_gaussian(1, 1000000, Seed(2024));
  double sum = 0, sum2 = 0, sum3 = 0, sum4 = 0;
  for (std::size_t j = 0; j < x.cols(); ++j) {
    const double v = x(0, j);
    sum += v;
    sum2 += v * v;
    sum3 += v * v * v;
    sum4 += v * v * v * v;
  }
  const double n = static_cast<double>(x.cols());
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean) <= 0.01);
  CHECK(std::abs(var - 1.0) <= 0.01);
  CHECK(std::abs(sum3 / n) <= 0.02);
  CHECK(std::abs(sum4 / n - 3.0) <= 0.05);
}

TEST_CASE("sample_gaussian determinism and stream separation") {
  CHECK(hgc::sample_gaussian(3, 3, Seed(5)) == hgc::sample_gaussian(3, 3, Seed(5)));
  CHECK_FALSE(hgc::sample_gaussian(2, 2, Seed(5, {0})) == hgc::sample_gaussian(2, 2, Seed(5, {1})));
  const hgc::Matrix full = hgc::sample_gaussian(16, 16, Seed(9, {3}));
  CHECK(hgc::sample_gaussian(16, 5, Seed(9, {3})) == full.left_cols(5));
}

TEST_CASE("adjacent substreams are uncorrelated") {
  // correlation of paired draws from sibling streams, 1e5 pairs
  Stream a(Seed(77, {0})), b(Seed(77, {1}));
  double sab = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sab += a.gaussian() * b.gaussian();
  CHECK(std::abs(sab / n) < 5.0 / std::sqrt(double(n)));
}
