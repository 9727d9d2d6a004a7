#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace qsa {

// All randomness in the library flows through std::mt19937_64 plus the
// helpers below. Distributions from <random> are avoided: their output is
// implementation-defined, these are not.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed-splitting rule: the generator for run `index` under master seed `s`
// is mt19937_64(splitmix64(s + index * golden)), golden = 2^64 / phi.
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master + (index + 1) * 0x9e3779b97f4a7c15ULL);
}

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Uniform double in [lo, hi).
inline double uniform_in(std::mt19937_64& gen, double lo, double hi) {
  return lo + (hi - lo) * uniform01(gen);
}

// Inverse-CDF draw over a probability vector, scanning indices in ascending
// order. The final index absorbs any rounding deficit.
inline int sample_index(const Eigen::VectorXd& probs, double u) {
  double acc = 0.0;
  const int n = static_cast<int>(probs.size());
  for (int i = 0; i < n; ++i) {
    acc += probs[i];
    if (u < acc) return i;
  }
  return n - 1;
}

}  // namespace qsa
