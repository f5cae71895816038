#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "bgpc/cxmat.hpp"
#include "bgpc/error.hpp"
#include "bgpc/rng.hpp"

namespace bgpc {

/// Row support of a jointly sparse X0. Indices are zero-based and sorted.
struct Sparsity {
  std::size_t s = 0;
  std::vector<std::size_t> support;
};

/// A blind gain and phase calibration instance, Y = diag(lambda0) * A * X0.
struct Instance {
  std::size_t n = 0;  // rows of A, length of lambda0
  std::size_t m = 0;  // columns of A
  std::size_t N = 0;  // snapshots, columns of X0
  ComplexVector lambda0;
  ComplexMatrix X0;
  ComplexMatrix A;
  std::optional<Sparsity> sparsity;
};

struct ScaleAlignment {
  Complex sigma;
  double relative_error = 0.0;
  bool degenerate = false;  // estimate (numerically) orthogonal to truth
};

inline void validate(const Instance& inst) {
  const auto n = static_cast<Index>(inst.n);
  const auto m = static_cast<Index>(inst.m);
  const auto N = static_cast<Index>(inst.N);
  if (inst.n == 0 || inst.m == 0 || inst.N == 0)
    throw DimensionError("instance: n, m, N must be positive");
  if (inst.A.rows() != n || inst.A.cols() != m)
    throw DimensionError("instance: A must be n x m");
  if (inst.X0.rows() != m || inst.X0.cols() != N)
    throw DimensionError("instance: X0 must be m x N");
  if (inst.lambda0.size() != n) throw DimensionError("instance: lambda0 must have length n");
  require_finite(inst.A, "instance A");
  require_finite(inst.X0, "instance X0");
  require_finite(inst.lambda0, "instance lambda0");
  if (inst.sparsity) {
    const auto& sp = *inst.sparsity;
    if (sp.s > inst.m) throw InputError("instance: s must not exceed m");
    if (sp.support.size() != sp.s) throw InputError("instance: |support| must equal s");
    if (!std::is_sorted(sp.support.begin(), sp.support.end()) ||
        std::adjacent_find(sp.support.begin(), sp.support.end()) != sp.support.end())
      throw InputError("instance: support must be strictly increasing");
    if (!sp.support.empty() && sp.support.back() >= inst.m)
      throw InputError("instance: support index out of range");
    std::vector<bool> in_support(inst.m, false);
    for (auto r : sp.support) in_support[r] = true;
    for (std::size_t r = 0; r < inst.m; ++r)
      if (!in_support[r] && !inst.X0.row(static_cast<Index>(r)).isZero(0.0))
        throw InputError("instance: X0 has a nonzero row outside the support");
  }
}

inline ComplexMatrix forward(const ComplexVector& lambda, const ComplexMatrix& A,
                             const ComplexMatrix& X) {
  if (A.cols() != X.rows() || lambda.size() != A.rows())
    throw DimensionError("forward: inconsistent dimensions");
  return lambda.asDiagonal() * (A * X);
}

inline ComplexMatrix forward(const Instance& inst) {
  validate(inst);
  return forward(inst.lambda0, inst.A, inst.X0);
}

/// Nonzero rows of X (exact zero test), zero-based.
inline std::vector<std::size_t> row_support(const ComplexMatrix& X) {
  std::vector<std::size_t> rows;
  for (Index r = 0; r < X.rows(); ++r)
    if (!X.row(r).isZero(0.0)) rows.push_back(static_cast<std::size_t>(r));
  return rows;
}

/// Generic instance: lambda0, A and the active rows of X0 are i.i.d. complex
/// standard normal. With `s`, the support is a uniformly random s-subset.
inline Instance random_instance(std::size_t n, std::size_t m, std::size_t N, std::uint64_t seed,
                                std::optional<std::size_t> s = std::nullopt) {
  if (n == 0 || m == 0 || N == 0) throw DimensionError("random_instance: n, m, N must be positive");
  if (s) {
    if (*s == 0 || *s > m) throw InputError("random_instance: need 1 <= s <= m");
  } else if (n <= m) {
    throw InputError("random_instance: subspace mode needs n > m");
  }
  Generator gen(seed);
  Instance inst;
  inst.n = n;
  inst.m = m;
  inst.N = N;

  std::vector<std::size_t> active(m);
  std::iota(active.begin(), active.end(), std::size_t{0});
  if (s) {
    // Partial Fisher-Yates: first s entries become a uniform s-subset.
    for (std::size_t i = 0; i < *s; ++i) std::swap(active[i], active[i + gen.uniform_index(m - 1 - i)]);
    active.resize(*s);
    std::sort(active.begin(), active.end());
    inst.sparsity = Sparsity{*s, active};
  }

  const auto ni = static_cast<Index>(n);
  const auto mi = static_cast<Index>(m);
  const auto Ni = static_cast<Index>(N);
  inst.lambda0 = gen.complex_normal(ni, 1);
  inst.A = gen.complex_normal(ni, mi);
  inst.X0 = ComplexMatrix::Zero(mi, Ni);
  for (auto r : active)
    for (Index j = 0; j < Ni; ++j) inst.X0(static_cast<Index>(r), j) = gen.complex_normal();
  return inst;
}

/// Smallest N with N >= (n-1)/(n-m): the optimal snapshot count under a
/// subspace constraint.
inline std::size_t min_samples_subspace(std::size_t n, std::size_t m) {
  if (m < 1 || n <= m) throw InputError("min_samples_subspace: need n > m >= 1");
  const std::size_t gap = n - m;
  return (n - 1 + gap - 1) / gap;
}

/// Smallest N with N >= (n-1)/(n-2s), joint sparsity with s nonzero rows.
inline std::size_t min_samples_joint_sparse(std::size_t n, std::size_t s) {
  if (s < 1 || n <= 2 * s) throw InputError("min_samples_joint_sparse: need n > 2s >= 2");
  const std::size_t gap = n - 2 * s;
  return (n - 1 + gap - 1) / gap;
}

/// Best complex sigma minimizing ||estimate - sigma * truth||_F.
inline ScaleAlignment align_scale(const ComplexMatrix& estimate, const ComplexMatrix& truth) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols())
    throw DimensionError("align_scale: shape mismatch");
  const double truth_norm2 = truth.squaredNorm();
  if (truth_norm2 == 0.0) throw InputError("align_scale: truth is all zero");
  ScaleAlignment out;
  out.sigma = vec(truth).dot(vec(estimate)) / truth_norm2;  // dot conjugates the left operand
  out.relative_error = (estimate - out.sigma * truth).norm() / std::sqrt(truth_norm2);
  const double est_norm = estimate.norm();
  out.degenerate = est_norm == 0.0 || std::abs(out.sigma) * std::sqrt(truth_norm2) <=
                                          64.0 * std::numeric_limits<double>::epsilon() * est_norm;
  return out;
}

}  // namespace bgpc
