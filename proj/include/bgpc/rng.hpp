#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

#include "bgpc/cxmat.hpp"

namespace bgpc {

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Folds a base seed with a coordinate tuple (e.g. n, dim, N, trial) into a
/// seed that identifies one stream. Any cell or trial can be regenerated in
/// isolation from its coordinates alone.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> coords) {
  std::uint64_t h = splitmix64(base);
  for (std::uint64_t c : coords) h = splitmix64(h ^ splitmix64(c + 0x632be59bd9b4e019ULL));
  return h;
}

class Generator {
 public:
  explicit Generator(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  /// Circularly-symmetric complex standard normal: real and imaginary parts
  /// independent with variance 1/2 each.
  Complex complex_normal() {
    const double re = normal_(engine_);
    const double im = normal_(engine_);
    return {re, im};
  }

  ComplexMatrix complex_normal(Index rows, Index cols) {
    ComplexMatrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) m(i, j) = complex_normal();
    return m;
  }

  std::size_t uniform_index(std::size_t upper_inclusive) {
    return std::uniform_int_distribution<std::size_t>(0, upper_inclusive)(engine_);
  }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, std::sqrt(0.5)};
};

}  // namespace bgpc
