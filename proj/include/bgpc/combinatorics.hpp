#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace bgpc {

/// Binomial coefficient, saturating at uint64 max.
inline std::uint64_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    const std::uint64_t num = n - k + i;
    // r * num / i is exact at every step; guard the multiply.
    if (r > std::numeric_limits<std::uint64_t>::max() / num)
      return std::numeric_limits<std::uint64_t>::max();
    r = r * num / i;
  }
  return r;
}

/// The rank-th k-subset of {0..n-1} in lexicographic order.
inline std::vector<std::size_t> nth_combination(std::size_t n, std::size_t k, std::uint64_t rank) {
  std::vector<std::size_t> out;
  out.reserve(k);
  std::size_t next = 0;
  for (std::size_t slot = 0; slot < k; ++slot) {
    for (std::size_t c = next; c < n; ++c) {
      const std::uint64_t with_c = binomial(n - c - 1, k - slot - 1);
      if (rank < with_c) {
        out.push_back(c);
        next = c + 1;
        break;
      }
      rank -= with_c;
    }
  }
  return out;
}

/// Advances a sorted k-subset of {0..n-1} to its lexicographic successor.
/// Returns false after the last subset.
inline bool next_combination(std::vector<std::size_t>& subset, std::size_t n) {
  const std::size_t k = subset.size();
  for (std::size_t i = k; i-- > 0;) {
    if (subset[i] < n - k + i) {
      ++subset[i];
      for (std::size_t j = i + 1; j < k; ++j) subset[j] = subset[j - 1] + 1;
      return true;
    }
  }
  return false;
}

inline std::vector<std::size_t> sorted_union(const std::vector<std::size_t>& a,
                                             const std::vector<std::size_t>& b) {
  std::vector<std::size_t> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i] < b[j])) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j] < a[i]) {
      out.push_back(b[j++]);
    } else {
      out.push_back(a[i++]);
      ++j;
    }
  }
  return out;
}

}  // namespace bgpc
