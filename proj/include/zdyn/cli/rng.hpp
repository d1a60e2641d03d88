#pragma once

// All randomness in the command-line runner goes through SplitMix64 so that
// fixtures can be regenerated bit-exactly in any language:
//
//   state <- state + 0x9E3779B97F4A7C15            (mod 2^64)
//   z     <- state
//   z     <- (z xor (z >> 30)) * 0xBF58476D1CE4E5B9 (mod 2^64)
//   z     <- (z xor (z >> 27)) * 0x94D049BB133111EB (mod 2^64)
//   out   <- z xor (z >> 31)
//
// A uniform double in [0, 1) is (out >> 11) * 2^-53.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "zdyn/dynamics.hpp"
#include "zdyn/errors.hpp"
#include "zdyn/game.hpp"

namespace zdyn::cli {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  double uniform01() { return static_cast<double>(next() >> 11) * 0x1p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

 private:
  std::uint64_t state_;
};

/// n x n matrix with entries uniform in [-1, 1), drawn row-major. The whole
/// matrix is redrawn while |det A| < det_guard.
inline GameMatrix random_game(SplitMix64& rng, std::size_t n, double det_guard = 1e-3) {
  if (n == 0) throw InvalidInput("random game dimension must be positive");
  for (int attempt = 0; attempt < 100000; ++attempt) {
    Matrix m(n, n);
    for (double& v : m.data()) v = rng.uniform(-1.0, 1.0);
    if (std::abs(determinant(m)) >= det_guard) return GameMatrix(std::move(m));
  }
  throw InvalidInput("random game: determinant guard never satisfied");
}

inline GameMatrix random_game(std::uint64_t seed, std::size_t n, double det_guard = 1e-3) {
  SplitMix64 rng(seed);
  return random_game(rng, n, det_guard);
}

/// k joint states of size `dim` with entries uniform in [-1, 1).
inline std::vector<JointState> random_initial(SplitMix64& rng, std::size_t dim, std::size_t k) {
  std::vector<JointState> out(k, JointState(dim));
  for (auto& w : out)
    for (double& v : w) v = rng.uniform(-1.0, 1.0);
  return out;
}

}  // namespace zdyn::cli
