#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

namespace hgc {

/// Identifies a random substream: a root seed plus a path of indices
/// (trial, column, purpose tag, ...). The substream key is a pure function
/// of (root, path), so trials can run in any order or in parallel and
/// still draw identical numbers.
struct Seed {
  std::uint64_t root = 0;
  std::vector<std::uint64_t> path;

  Seed() = default;
  explicit Seed(std::uint64_t root_seed, std::vector<std::uint64_t> stream_path = {})
      : root(root_seed), path(std::move(stream_path)) {}

  /// Same root, path extended by one index.
  Seed child(std::uint64_t index) const;

  /// 64-bit key of the substream.
  std::uint64_t key() const;

  std::string to_string() const;

  friend bool operator==(const Seed&, const Seed&) = default;
};

/// SplitMix64 output function (Steele, Lea & Flood; Vigna's constants).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based generator over one substream: output k is
/// mix64(key + (k + 1) * golden_gamma), i.e. SplitMix64 started at `key`.
/// Gaussian variates use the Marsaglia polar method, which produces exact
/// N(0, 1) draws in pairs; the spare is cached.
class Stream {
 public:
  explicit Stream(const Seed& seed) : Stream(seed.key()) {}
  explicit Stream(std::uint64_t key) noexcept : state_(key) {}

  std::uint64_t next_u64() noexcept {
    state_ += kGamma;
    return mix64(state_);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double gaussian();

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace hgc
