#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "bgpc/error.hpp"

namespace bgpc {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Index = Eigen::Index;

struct RankResult {
  std::size_t numeric_rank = 0;
  std::vector<double> singular_values;  // nonincreasing
  double tolerance_used = 0.0;
};

struct NullSpaceResult {
  std::vector<ComplexVector> basis;  // orthonormal
  RankResult rank;
};

inline void require_nonempty(const ComplexMatrix& m, const char* what) {
  if (m.rows() == 0 || m.cols() == 0)
    throw DimensionError(std::string(what) + ": matrix must be nonempty");
}

inline void require_finite(const ComplexMatrix& m, const char* what) {
  if (!m.allFinite()) throw InputError(std::string(what) + ": non-finite entry");
}

/// Unnormalized n x n DFT matrix, entry (j,k) = exp(-2*pi*i*j*k/n) with
/// zero-based j,k. Every entry has unit modulus.
inline ComplexMatrix dft_matrix(Index n) {
  if (n < 1) throw DimensionError("dft_matrix: n must be >= 1");
  ComplexMatrix f(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index k = 0; k < n; ++k) {
      // Reduce the exponent mod n first so large j*k keeps full accuracy.
      const auto e = static_cast<double>((j * k) % n);
      f(j, k) = std::polar(1.0, -2.0 * std::numbers::pi * e / static_cast<double>(n));
    }
  }
  return f;
}

inline ComplexMatrix kronecker(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
  require_nonempty(lhs, "kronecker");
  require_nonempty(rhs, "kronecker");
  const Index pr = rhs.rows();
  const Index qr = rhs.cols();
  ComplexMatrix out(lhs.rows() * pr, lhs.cols() * qr);
  for (Index i = 0; i < lhs.rows(); ++i)
    for (Index j = 0; j < lhs.cols(); ++j) out.block(i * pr, j * qr, pr, qr) = lhs(i, j) * rhs;
  return out;
}

inline ComplexMatrix hadamard(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
  if (lhs.rows() != rhs.rows() || lhs.cols() != rhs.cols())
    throw DimensionError("hadamard: shape mismatch");
  return lhs.cwiseProduct(rhs);
}

/// Column-major stacking of the columns of m.
inline ComplexVector vec(const ComplexMatrix& m) {
  return Eigen::Map<const ComplexVector>(m.data(), m.size());
}

inline ComplexMatrix unvec(const ComplexVector& v, Index rows, Index cols) {
  if (v.size() != rows * cols) throw DimensionError("unvec: length mismatch");
  return Eigen::Map<const ComplexMatrix>(v.data(), rows, cols);
}

/// max(rows, cols) * eps * sigma_max.
inline double default_rank_tolerance(Index rows, Index cols, double sigma_max) {
  return static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon() *
         sigma_max;
}

namespace detail {

inline RankResult rank_from_singular_values(const Eigen::VectorXd& sv, Index rows, Index cols,
                                            std::optional<double> tol) {
  RankResult r;
  r.singular_values.assign(sv.data(), sv.data() + sv.size());
  const double smax = r.singular_values.empty() ? 0.0 : r.singular_values.front();
  r.tolerance_used = tol ? *tol : default_rank_tolerance(rows, cols, smax);
  if (r.tolerance_used < 0.0 || std::isnan(r.tolerance_used))
    throw InputError("rank tolerance must be a nonnegative number");
  r.numeric_rank = static_cast<std::size_t>(
      std::count_if(r.singular_values.begin(), r.singular_values.end(),
                    [&](double s) { return s > r.tolerance_used; }));
  return r;
}

}  // namespace detail

inline RankResult numeric_rank(const ComplexMatrix& m, std::optional<double> tol = std::nullopt) {
  require_nonempty(m, "numeric_rank");
  require_finite(m, "numeric_rank");
  Eigen::BDCSVD<ComplexMatrix> svd(m);
  return detail::rank_from_singular_values(svd.singularValues(), m.rows(), m.cols(), tol);
}

/// Orthonormal basis of the right null space, sized cols - numeric_rank,
/// together with the rank data that decided it.
inline NullSpaceResult analyze_null_space(const ComplexMatrix& m,
                                          std::optional<double> tol = std::nullopt) {
  require_nonempty(m, "null_space");
  require_finite(m, "null_space");
  Eigen::BDCSVD<ComplexMatrix> svd(m, Eigen::ComputeFullV);
  NullSpaceResult out;
  out.rank = detail::rank_from_singular_values(svd.singularValues(), m.rows(), m.cols(), tol);
  const ComplexMatrix& v = svd.matrixV();
  for (Index c = static_cast<Index>(out.rank.numeric_rank); c < m.cols(); ++c)
    out.basis.emplace_back(v.col(c));
  return out;
}

inline std::vector<ComplexVector> null_space(const ComplexMatrix& m,
                                             std::optional<double> tol = std::nullopt) {
  return analyze_null_space(m, tol).basis;
}

inline std::vector<ComplexVector> left_null_space(const ComplexMatrix& m,
                                                  std::optional<double> tol = std::nullopt) {
  return null_space(m.adjoint(), tol);
}

}  // namespace bgpc
