#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bgpc/certify.hpp"
#include "bgpc/combinatorics.hpp"
#include "bgpc/cxmat.hpp"
#include "bgpc/error.hpp"
#include "bgpc/model.hpp"
#include "bgpc/parallel.hpp"

namespace bgpc {

enum class RecoveryStatus { Unique, Ambiguous, DegenerateGamma };

inline const char* to_string(RecoveryStatus s) {
  switch (s) {
    case RecoveryStatus::Unique: return "unique";
    case RecoveryStatus::Ambiguous: return "ambiguous";
    case RecoveryStatus::DegenerateGamma: return "degenerate_gamma";
  }
  return "unknown";
}

/// Solution of diag(lambda) A X = Y up to one global scale. gamma holds the
/// reciprocal gains, which is what the linear system actually solves for.
struct RecoveryResult {
  ComplexVector gamma;
  ComplexVector lambda;
  ComplexMatrix X;
  std::size_t null_dim = 0;
  RecoveryStatus status = RecoveryStatus::Ambiguous;
  bool consistent = true;  // false when a least-squares direction was substituted
  std::optional<std::vector<std::size_t>> support;  // zero-based, joint-sparse only
};

struct RecoverOptions {
  std::optional<double> tol;
  // |gamma_k| <= gamma_tol * max|gamma| marks a gain that cannot be inverted.
  double gamma_tol = std::sqrt(std::numeric_limits<double>::epsilon());
  // A second singular value within this factor of the tolerance is too
  // close to call, so uniqueness is not claimed.
  double margin_factor = 10.0;
  // Noisy data: fall back to the smallest right singular vector instead of
  // failing when the null space is empty. No accuracy contract.
  bool allow_inconsistent = false;
  std::uint64_t max_cells = 1'000'000;
  std::size_t threads = 1;
};

/// Homogeneous system over (vec(X), gamma): equation (k, j), stored in row
/// j*n + k, reads A(k,:) X(:,j) - gamma_k Y(k,j) = 0.
inline ComplexMatrix build_recovery_system(const ComplexMatrix& Y, const ComplexMatrix& A) {
  require_nonempty(Y, "build_recovery_system");
  require_nonempty(A, "build_recovery_system");
  if (Y.rows() != A.rows()) throw DimensionError("build_recovery_system: Y and A row counts differ");
  const Index n = A.rows();
  const Index m = A.cols();
  const Index N = Y.cols();
  ComplexMatrix L = ComplexMatrix::Zero(n * N, m * N + n);
  for (Index j = 0; j < N; ++j) {
    for (Index k = 0; k < n; ++k) {
      const Index r = j * n + k;
      L.block(r, j * m, 1, m) = A.row(k);
      L(r, m * N + k) = -Y(k, j);
    }
  }
  return L;
}

namespace detail {

struct SystemSolution {
  std::size_t null_dim = 0;
  bool marginal = false;
  bool consistent = true;
  std::optional<ComplexVector> direction;  // set when a single direction is available
};

inline SystemSolution solve_homogeneous(const ComplexMatrix& L, const RecoverOptions& opts) {
  require_finite(L, "recover");
  Eigen::BDCSVD<ComplexMatrix> svd(L, Eigen::ComputeFullV);
  const RankResult rank =
      rank_from_singular_values(svd.singularValues(), L.rows(), L.cols(), opts.tol);
  SystemSolution out;
  const auto cols = static_cast<std::size_t>(L.cols());
  out.null_dim = cols - rank.numeric_rank;
  const double margin = opts.margin_factor * rank.tolerance_used;
  const auto strong = static_cast<std::size_t>(
      std::count_if(rank.singular_values.begin(), rank.singular_values.end(),
                    [&](double s) { return s > margin; }));
  const std::size_t loose_null = cols - strong;
  if (out.null_dim == 0) {
    if (!opts.allow_inconsistent) return out;
    out.consistent = false;
    out.marginal = loose_null >= 2;
    out.direction = svd.matrixV().col(L.cols() - 1);
    return out;
  }
  out.marginal = loose_null >= 2;
  if (out.null_dim == 1) out.direction = svd.matrixV().col(L.cols() - 1);
  return out;
}

// Splits a null vector into (X, gamma) with a deterministic global phase:
// the largest-magnitude gamma entry becomes real and positive.
inline RecoveryResult split_solution(const ComplexVector& v, Index m, Index N, Index n,
                                     double gamma_tol) {
  RecoveryResult r;
  ComplexVector gamma = v.tail(n);
  Index pivot = 0;
  const double gmax = gamma.cwiseAbs().maxCoeff(&pivot);
  const Complex phase = gmax > 0.0 ? std::conj(gamma(pivot)) / gmax : Complex{1.0, 0.0};
  const ComplexVector w = v * phase;
  r.gamma = w.tail(n);
  r.X = unvec(w.head(m * N), m, N);
  const bool degenerate =
      gmax == 0.0 || (r.gamma.cwiseAbs().array() <= gamma_tol * gmax).any();
  if (degenerate) {
    r.status = RecoveryStatus::DegenerateGamma;
    r.lambda = ComplexVector();
  } else {
    r.status = RecoveryStatus::Unique;
    r.lambda = r.gamma.cwiseInverse();
  }
  return r;
}

}  // namespace detail

inline RecoveryResult recover(const ComplexMatrix& Y, const ComplexMatrix& A,
                              const RecoverOptions& opts = {}) {
  require_finite(Y, "recover Y");
  require_finite(A, "recover A");
  const ComplexMatrix L = build_recovery_system(Y, A);
  const auto sol = detail::solve_homogeneous(L, opts);
  if (!sol.direction && sol.null_dim == 0)
    throw InconsistentError("recover: measurements admit no exact solution (null space is empty)");
  RecoveryResult r;
  if (sol.direction)
    r = detail::split_solution(*sol.direction, A.cols(), Y.cols(), A.rows(), opts.gamma_tol);
  r.null_dim = sol.null_dim;
  r.consistent = sol.consistent;
  if (sol.null_dim > 1 || sol.marginal) {
    r.status = RecoveryStatus::Ambiguous;
    r.lambda = ComplexVector();
  }
  return r;
}

/// Tries every s-subset J of dictionary columns. A support passes when its
/// restricted system has a one-dimensional null space with invertible gains.
/// The answer is Unique only if at least one support passes, none is
/// ambiguous, and all passing supports give scale-equivalent solutions.
inline RecoveryResult recover_joint_sparse(const ComplexMatrix& Y, const ComplexMatrix& A,
                                           std::size_t s, const RecoverOptions& opts = {}) {
  require_nonempty(A, "recover_joint_sparse");
  require_finite(Y, "recover_joint_sparse Y");
  require_finite(A, "recover_joint_sparse A");
  if (Y.rows() != A.rows()) throw DimensionError("recover_joint_sparse: Y and A row counts differ");
  const auto n = static_cast<std::size_t>(A.rows());
  const auto m = static_cast<std::size_t>(A.cols());
  if (s < 1 || s > m) throw InputError("recover_joint_sparse: need 1 <= s <= m");
  if (n <= 2 * s) throw InputError("recover_joint_sparse: need n > 2s");
  const std::uint64_t cells = binomial(m, s);
  if (cells > opts.max_cells)
    throw BudgetError("recover_joint_sparse: " + std::to_string(cells) +
                      " candidate supports exceed budget " + std::to_string(opts.max_cells));

  struct Cell {
    std::size_t null_dim = 0;
    bool ambiguous = false;
    std::optional<RecoveryResult> solution;
  };
  const Index N = Y.cols();
  const auto si = static_cast<Index>(s);
  std::vector<Cell> results(cells);
  parallel_for(cells, std::max<std::size_t>(1, opts.threads), [&](std::size_t idx) {
    const auto J = nth_combination(m, s, idx);
    const auto sol = detail::solve_homogeneous(build_recovery_system(Y, select_columns(A, J)), opts);
    Cell c;
    c.null_dim = sol.null_dim;
    if (sol.null_dim > 1 || sol.marginal) {
      c.ambiguous = true;
    } else if (sol.direction) {
      auto r = detail::split_solution(*sol.direction, si, N, A.rows(), opts.gamma_tol);
      if (r.status == RecoveryStatus::DegenerateGamma) {
        c.ambiguous = true;
      } else {
        ComplexMatrix full = ComplexMatrix::Zero(static_cast<Index>(m), N);
        for (std::size_t t = 0; t < J.size(); ++t)
          full.row(static_cast<Index>(J[t])) = r.X.row(static_cast<Index>(t));
        r.X = std::move(full);
        r.support = J;
        r.consistent = sol.consistent;
        c.solution = std::move(r);
      }
    }
    results[idx] = std::move(c);
  });

  std::size_t max_null = 0;
  bool any_ambiguous = false;
  const RecoveryResult* first = nullptr;
  bool equivalent = true;
  for (const auto& c : results) {
    max_null = std::max(max_null, c.null_dim);
    any_ambiguous = any_ambiguous || c.ambiguous;
    if (!c.solution) continue;
    if (!first) {
      first = &*c.solution;
    } else {
      const auto fit = align_scale(c.solution->X, first->X);
      equivalent = equivalent && !fit.degenerate && fit.relative_error <= 1e-6;
    }
  }
  if (!first && !any_ambiguous)
    throw InconsistentError("recover_joint_sparse: no candidate support admits a solution");
  if (first && !any_ambiguous && equivalent) {
    RecoveryResult out = *first;
    out.null_dim = 1;
    return out;
  }
  RecoveryResult out;
  out.status = RecoveryStatus::Ambiguous;
  out.null_dim = max_null;
  return out;
}

}  // namespace bgpc
