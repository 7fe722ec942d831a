#include "hgc/seed.hpp"

#include <cmath>

namespace hgc {

Seed Seed::child(std::uint64_t index) const {
  Seed out = *this;
  out.path.push_back(index);
  return out;
}

std::uint64_t Seed::key() const {
  // Each path element is absorbed through a full mix, and the path length is
  // folded in last, so (r, [a]) and (r, [a, 0]) land on unrelated keys.
  std::uint64_t k = mix64(root ^ 0x6A09E667F3BCC909ULL);
  for (std::uint64_t p : path) {
    k = mix64(k + 0x9E3779B97F4A7C15ULL + mix64(p + 0xBB67AE8584CAA73BULL));
  }
  return mix64(k ^ (static_cast<std::uint64_t>(path.size()) * 0x3C6EF372FE94F82BULL));
}

std::string Seed::to_string() const {
  std::string s = std::to_string(root) + ":[";
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(path[i]);
  }
  return s + "]";
}

double Stream::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

}  // namespace hgc
