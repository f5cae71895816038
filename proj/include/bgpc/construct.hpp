#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bgpc/certify.hpp"
#include "bgpc/combinatorics.hpp"
#include "bgpc/cxmat.hpp"
#include "bgpc/error.hpp"

namespace bgpc {

/// Deterministic rank witness: X0 is the first N columns of I_m and A is a
/// column subset of the n x n DFT matrix. Column indices are zero-based here
/// and one-based only in the JSON files.
struct ConstructedInstance {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t N = 0;
  std::vector<std::size_t> selected_cols;    // sorted, m entries
  std::vector<std::size_t> complement_cols;  // sorted, n - m entries
  ComplexMatrix A;
  ComplexMatrix X0;
  std::int64_t expected_left_null_dim = 0;  // n(N-1) - (mN-1)
};

struct ConstructionCheck {
  std::size_t stacked_rank = 0;
  std::size_t D_rank = 0;
  std::size_t left_null_dim = 0;
  std::int64_t expected_left_null_dim = 0;
  double tolerance_used = 0.0;  // applied to D
  bool pass = false;
};

/// Exact integer feasibility test (n-m)N >= n-1.
constexpr bool construction_feasible(std::size_t n, std::size_t m, std::size_t N) {
  return n > m && (n - m) * N >= n - 1;
}

/// True when no circular window of N consecutive columns (columns 0 and n-1
/// adjacent) is entirely selected, except the leading block 0..N-1.
inline bool selection_windows_ok(const std::vector<std::size_t>& selected, std::size_t n,
                                 std::size_t N) {
  std::vector<bool> picked(n, false);
  for (auto c : selected) {
    if (c >= n) return false;
    picked[c] = true;
  }
  for (std::size_t start = 1; start < n; ++start) {
    bool all = true;
    for (std::size_t t = 0; t < N && all; ++t) all = picked[(start + t) % n];
    if (all) return false;
  }
  return true;
}

namespace detail {

// Most columns selectable among `len` upcoming positions when `run`
// selected columns immediately precede them and runs must stay below N.
inline std::size_t selection_capacity(std::size_t len, std::size_t run, std::size_t N) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < len; ++i) {
    if (run + 1 < N) {
      ++run;
      ++count;
    } else {
      run = 0;
    }
  }
  return count;
}

}  // namespace detail

inline ConstructedInstance construct_claim1(std::size_t n, std::size_t m, std::size_t N) {
  if (N < 2) throw InputError("construct: need N >= 2");
  if (m < N) throw InputError("construct: need m >= N");
  if (n <= m) throw InputError("construct: need n > m");
  if (!construction_feasible(n, m, N))
    throw InfeasibleError("construct: (n-m)N = " + std::to_string((n - m) * N) +
                          " < n-1 = " + std::to_string(n - 1));

  // Zero-based: columns 0..N-1 are fixed, N and n-1 are never picked, the
  // remaining m-N picks come from N+1..n-2 with selected runs shorter than N.
  std::vector<std::size_t> selected;
  for (std::size_t c = 0; c < N; ++c) selected.push_back(c);
  const std::size_t target = m - N;
  std::size_t extras = 0;
  std::size_t run = 0;
  for (std::size_t c = N + 1; c + 1 < n; ++c) {
    const std::size_t remaining = (n - 1) - (c + 1);
    const bool room = extras < target;
    const bool window_ok = run + 1 < N;
    const bool reachable =
        extras + 1 + detail::selection_capacity(remaining, run + 1, N) >= target;
    if (room && window_ok && reachable) {
      selected.push_back(c);
      ++extras;
      ++run;
    } else {
      run = 0;
    }
  }
  if (extras != target) throw std::logic_error("construct: greedy selection fell short");

  ConstructedInstance ci;
  ci.n = n;
  ci.m = m;
  ci.N = N;
  ci.selected_cols = selected;
  std::vector<bool> picked(n, false);
  for (auto c : selected) picked[c] = true;
  for (std::size_t c = 0; c < n; ++c)
    if (!picked[c]) ci.complement_cols.push_back(c);
  ci.A = select_columns(dft_matrix(static_cast<Index>(n)), selected);
  ci.X0 = ComplexMatrix::Identity(static_cast<Index>(m), static_cast<Index>(N));
  ci.expected_left_null_dim = static_cast<std::int64_t>(n * (N - 1)) -
                              (static_cast<std::int64_t>(m * N) - 1);
  return ci;
}

/// Checks rank(stacked) = mN, rank(D) = mN-1 and that the left null space
/// of D has exactly the expected dimension.
inline ConstructionCheck verify_claim1_rank(const ConstructedInstance& ci,
                                            std::optional<double> tol = std::nullopt) {
  const ComplexMatrix d = build_D(ci.A, ci.X0);
  const ComplexMatrix stacked = build_stacked(ci.A, ci.X0);
  ConstructionCheck out;
  const RankResult d_rank = numeric_rank(d, tol);
  out.D_rank = d_rank.numeric_rank;
  out.tolerance_used = d_rank.tolerance_used;
  out.stacked_rank = numeric_rank(stacked, tol).numeric_rank;
  // same singular values, so no second decomposition of D^H
  out.left_null_dim = static_cast<std::size_t>(d.rows()) - out.D_rank;
  out.expected_left_null_dim = ci.expected_left_null_dim;
  const std::size_t mN = ci.m * ci.N;
  out.pass = out.stacked_rank == mN && out.D_rank + 1 == mN &&
             static_cast<std::int64_t>(out.left_null_dim) == ci.expected_left_null_dim;
  return out;
}

/// Construction restricted to a support union J0 u J1: the witness of size
/// (n, l, N) is relabelled so that its nonzero X0 rows land on J0.
struct UnionConstruction {
  ConstructedInstance base;                  // construction order
  std::vector<std::size_t> union_support;    // J0 u J1, sorted, zero-based
  std::vector<std::size_t> permutation;      // union position -> construction position
  ComplexMatrix A_union;                     // n x l, union order
  ComplexMatrix X0_union;                    // l x N, union order
};

inline UnionConstruction construct_claim2(std::size_t n, std::size_t m, std::size_t s,
                                          std::size_t N, const std::vector<std::size_t>& J0,
                                          const std::vector<std::size_t>& J1) {
  auto check_support = [&](const std::vector<std::size_t>& J, const char* name) {
    if (J.size() != s) throw InputError(std::string("construct_claim2: |") + name + "| must be s");
    if (!std::is_sorted(J.begin(), J.end()) ||
        std::adjacent_find(J.begin(), J.end()) != J.end() || (!J.empty() && J.back() >= m))
      throw InputError(std::string("construct_claim2: ") + name + " must be sorted, distinct, < m");
  };
  check_support(J0, "J0");
  check_support(J1, "J1");
  if (n <= 2 * s) throw InputError("construct_claim2: need n > 2s");
  if (N > s) throw InputError("construct_claim2: need N <= s");

  UnionConstruction uc;
  uc.union_support = sorted_union(J0, J1);
  const std::size_t l = uc.union_support.size();
  uc.base = construct_claim1(n, l, N);

  // J0 members take construction slots 0..s-1 in order, the rest follow.
  uc.permutation.assign(l, 0);
  std::size_t front = 0;
  std::size_t back = s;
  for (std::size_t p = 0; p < l; ++p) {
    const bool in_j0 = std::binary_search(J0.begin(), J0.end(), uc.union_support[p]);
    uc.permutation[p] = in_j0 ? front++ : back++;
  }
  uc.A_union = select_columns(uc.base.A, uc.permutation);
  uc.X0_union = select_rows(uc.base.X0, uc.permutation);
  return uc;
}

struct UnionConstructionCheck {
  ConstructionCheck base;
  std::size_t union_stacked_rank = 0;
  std::size_t required_rank = 0;  // l * N
  bool pass = false;
};

inline UnionConstructionCheck verify_claim2_rank(const UnionConstruction& uc,
                                                 std::optional<double> tol = std::nullopt) {
  UnionConstructionCheck out;
  out.base = verify_claim1_rank(uc.base, tol);
  out.union_stacked_rank = numeric_rank(build_stacked(uc.A_union, uc.X0_union), tol).numeric_rank;
  out.required_rank = uc.union_support.size() * uc.base.N;
  out.pass = out.base.pass && out.union_stacked_rank == out.required_rank;
  return out;
}

}  // namespace bgpc
