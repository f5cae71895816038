#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bgpc/combinatorics.hpp"
#include "bgpc/cxmat.hpp"
#include "bgpc/error.hpp"
#include "bgpc/model.hpp"
#include "bgpc/parallel.hpp"

namespace bgpc {

enum class Mode { Subspace, JointSparse };
enum class Verdict { IdentifiableUpToScaling, NotCertified };

inline const char* to_string(Mode m) {
  return m == Mode::Subspace ? "subspace" : "joint_sparse";
}
inline const char* to_string(Verdict v) {
  return v == Verdict::IdentifiableUpToScaling ? "identifiable_up_to_scaling" : "not_certified";
}

/// Outcome of the two-condition identifiability test. A NotCertified verdict
/// means the sufficient condition failed; it is not a proof of ambiguity.
struct CertificateReport {
  Mode mode = Mode::Subspace;
  Verdict verdict = Verdict::NotCertified;
  bool condition1_rank_full = false;
  bool condition2_lambda_unique = false;
  std::size_t stacked_rank = 0;
  std::size_t required_rank = 0;
  double tolerance_used = 0.0;
  std::optional<std::uint64_t> support_cells_checked;
  std::optional<std::vector<std::size_t>> failing_support;  // zero-based J1
};

struct JointSparseOptions {
  std::optional<double> tol;
  std::uint64_t max_cells = 1'000'000;
  std::size_t threads = 1;
};

namespace detail {

inline void require_snapshots(Index N, const char* what) {
  if (N < 2)
    throw UnsupportedError(std::string(what) +
                           ": need N >= 2 snapshots (a single snapshot has no cross constraints)");
}

inline Verdict verdict_of(bool c1, bool c2) {
  return c1 && c2 ? Verdict::IdentifiableUpToScaling : Verdict::NotCertified;
}

}  // namespace detail

/// D(a, X0) = L(a, X0) kron a, where row j of the (N-1) x N factor L holds
/// -a*X0(:,j+1) in column 0 and a*X0(:,0) in column j+1.
inline ComplexMatrix build_D_block(const ComplexMatrix& a_row, const ComplexMatrix& X0) {
  if (a_row.rows() != 1 || a_row.cols() != X0.rows())
    throw DimensionError("build_D_block: a_row must be 1 x m with m = rows(X0)");
  detail::require_snapshots(X0.cols(), "build_D_block");
  const Index N = X0.cols();
  const ComplexMatrix ax = a_row * X0;  // 1 x N
  ComplexMatrix left = ComplexMatrix::Zero(N - 1, N);
  for (Index j = 0; j + 1 < N; ++j) {
    left(j, 0) = -ax(0, j + 1);
    left(j, j + 1) = ax(0, 0);
  }
  return kronecker(left, a_row);
}

/// All n D blocks stacked, n(N-1) x mN.
inline ComplexMatrix build_D(const ComplexMatrix& A, const ComplexMatrix& X0) {
  if (A.cols() != X0.rows()) throw DimensionError("build_D: A columns must match X0 rows");
  require_nonempty(A, "build_D");
  detail::require_snapshots(X0.cols(), "build_D");
  const Index N = X0.cols();
  ComplexMatrix d(A.rows() * (N - 1), A.cols() * N);
  for (Index k = 0; k < A.rows(); ++k) d.middleRows(k * (N - 1), N - 1) = build_D_block(A.row(k), X0);
  return d;
}

/// vec(X0)^* on top of D(A, X0): the (1 + n(N-1)) x mN certificate matrix.
inline ComplexMatrix build_stacked(const ComplexMatrix& A, const ComplexMatrix& X0) {
  const ComplexMatrix d = build_D(A, X0);
  ComplexMatrix out(d.rows() + 1, d.cols());
  out.row(0) = vec(X0).adjoint();
  out.bottomRows(d.rows()) = d;
  return out;
}

inline ComplexMatrix select_columns(const ComplexMatrix& M, const std::vector<std::size_t>& cols) {
  ComplexMatrix out(M.rows(), static_cast<Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (cols[c] >= static_cast<std::size_t>(M.cols())) throw InputError("column index out of range");
    out.col(static_cast<Index>(c)) = M.col(static_cast<Index>(cols[c]));
  }
  return out;
}

inline ComplexMatrix select_rows(const ComplexMatrix& M, const std::vector<std::size_t>& rows) {
  ComplexMatrix out(static_cast<Index>(rows.size()), M.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= static_cast<std::size_t>(M.rows())) throw InputError("row index out of range");
    out.row(static_cast<Index>(r)) = M.row(static_cast<Index>(rows[r]));
  }
  return out;
}

/// build_stacked on A(:, J) and X0(J, :). J is zero-based.
inline ComplexMatrix build_stacked_restricted(const ComplexMatrix& A, const ComplexMatrix& X0,
                                              const std::vector<std::size_t>& J) {
  if (J.empty()) throw InputError("build_stacked_restricted: empty index set");
  if (A.cols() != X0.rows()) throw DimensionError("build_stacked_restricted: A/X0 mismatch");
  return build_stacked(select_columns(A, J), select_rows(X0, J));
}

/// No zero rows in A*X0 and no zero gains, each judged against
/// eps * sqrt(m) * (largest magnitude in the same object).
inline bool gains_and_rows_nonzero(const ComplexMatrix& A, const ComplexMatrix& X0,
                                   const ComplexVector& lambda0) {
  const double eps = std::numeric_limits<double>::epsilon();
  const double root_m = std::sqrt(static_cast<double>(A.cols()));
  const ComplexMatrix ax = A * X0;
  const double ax_tol = eps * root_m * ax.cwiseAbs().maxCoeff();
  for (Index k = 0; k < ax.rows(); ++k)
    if (!(ax.row(k).norm() > ax_tol)) return false;
  const double lam_tol = eps * root_m * lambda0.cwiseAbs().maxCoeff();
  for (Index k = 0; k < lambda0.size(); ++k)
    if (!(std::abs(lambda0(k)) > lam_tol)) return false;
  return true;
}

inline CertificateReport certify_subspace(const ComplexMatrix& A, const ComplexMatrix& X0,
                                          const ComplexVector& lambda0,
                                          std::optional<double> tol = std::nullopt) {
  require_nonempty(A, "certify_subspace");
  if (A.rows() <= A.cols()) throw InputError("certify_subspace: need n > m (tall A)");
  if (X0.rows() != A.cols() || lambda0.size() != A.rows())
    throw DimensionError("certify_subspace: inconsistent dimensions");
  detail::require_snapshots(X0.cols(), "certify_subspace");
  require_finite(A, "certify_subspace A");
  require_finite(X0, "certify_subspace X0");
  require_finite(lambda0, "certify_subspace lambda0");

  CertificateReport rep;
  rep.mode = Mode::Subspace;
  rep.condition2_lambda_unique = gains_and_rows_nonzero(A, X0, lambda0);
  const RankResult rank = numeric_rank(build_stacked(A, X0), tol);
  rep.stacked_rank = rank.numeric_rank;
  rep.required_rank = static_cast<std::size_t>(A.cols() * X0.cols());
  rep.tolerance_used = rank.tolerance_used;
  rep.condition1_rank_full = rep.stacked_rank == rep.required_rank;
  rep.verdict = detail::verdict_of(rep.condition1_rank_full, rep.condition2_lambda_unique);
  return rep;
}

inline CertificateReport certify_subspace(const Instance& inst,
                                          std::optional<double> tol = std::nullopt) {
  validate(inst);
  return certify_subspace(inst.A, inst.X0, inst.lambda0, tol);
}

/// Joint-sparsity certificate: the restricted stacked matrix on J0 u J1 must
/// have full column rank for every s-subset J1, J0 being the row support of
/// X0. Subsets are scanned in lexicographic order; the first failing J1 (in
/// that order) is reported, independent of the thread count.
inline CertificateReport certify_joint_sparse(const ComplexMatrix& A, const ComplexMatrix& X0,
                                              const ComplexVector& lambda0, std::size_t s,
                                              const JointSparseOptions& opts = {}) {
  require_nonempty(A, "certify_joint_sparse");
  if (X0.rows() != A.cols() || lambda0.size() != A.rows())
    throw DimensionError("certify_joint_sparse: inconsistent dimensions");
  const auto n = static_cast<std::size_t>(A.rows());
  const auto m = static_cast<std::size_t>(A.cols());
  if (s < 1 || s > m) throw InputError("certify_joint_sparse: need 1 <= s <= m");
  if (n <= 2 * s) throw InputError("certify_joint_sparse: need n > 2s");
  detail::require_snapshots(X0.cols(), "certify_joint_sparse");
  require_finite(A, "certify_joint_sparse A");
  require_finite(X0, "certify_joint_sparse X0");
  require_finite(lambda0, "certify_joint_sparse lambda0");
  const std::vector<std::size_t> J0 = row_support(X0);
  if (J0.size() != s)
    throw InputError("certify_joint_sparse: X0 must have exactly s nonzero rows (found " +
                     std::to_string(J0.size()) + ")");
  const std::uint64_t cells = binomial(m, s);
  if (cells > opts.max_cells)
    throw BudgetError("certify_joint_sparse: C(" + std::to_string(m) + "," + std::to_string(s) +
                      ") = " + std::to_string(cells) + " support cells exceeds budget " +
                      std::to_string(opts.max_cells));

  struct Cell {
    bool full = false;
    std::size_t rank = 0;
    std::size_t required = 0;
    double tol = 0.0;
  };
  const auto N = static_cast<std::size_t>(X0.cols());
  auto evaluate = [&](std::uint64_t idx) {
    const auto J = sorted_union(J0, nth_combination(m, s, idx));
    const RankResult r = numeric_rank(build_stacked_restricted(A, X0, J), opts.tol);
    const std::size_t required = J.size() * N;
    return Cell{r.numeric_rank == required, r.numeric_rank, required, r.tolerance_used};
  };

  CertificateReport rep;
  rep.mode = Mode::JointSparse;
  rep.condition2_lambda_unique = gains_and_rows_nonzero(A, X0, lambda0);

  const std::size_t threads = std::max<std::size_t>(1, opts.threads);
  const std::uint64_t batch = threads * 32;
  std::optional<std::uint64_t> first_fail;
  std::uint64_t checked = 0;
  std::optional<Cell> reported;
  for (std::uint64_t start = 0; start < cells && !first_fail; start += batch) {
    const std::uint64_t len = std::min(batch, cells - start);
    std::vector<Cell> results(len);
    parallel_for(len, threads, [&](std::size_t i) { results[i] = evaluate(start + i); });
    for (std::uint64_t i = 0; i < len; ++i) {
      ++checked;
      const Cell& c = results[i];
      if (!c.full) {
        first_fail = start + i;
        reported = c;
        break;
      }
      // On success report the most demanding cell (largest union, earliest).
      if (!reported || c.required > reported->required) reported = c;
    }
  }
  rep.support_cells_checked = checked;
  rep.condition1_rank_full = !first_fail.has_value();
  if (first_fail) rep.failing_support = nth_combination(m, s, *first_fail);
  rep.stacked_rank = reported->rank;
  rep.required_rank = reported->required;
  rep.tolerance_used = reported->tol;
  rep.verdict = detail::verdict_of(rep.condition1_rank_full, rep.condition2_lambda_unique);
  return rep;
}

inline CertificateReport certify_joint_sparse(const Instance& inst, std::size_t s,
                                              const JointSparseOptions& opts = {}) {
  validate(inst);
  return certify_joint_sparse(inst.A, inst.X0, inst.lambda0, s, opts);
}

}  // namespace bgpc
