#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace jitvd {

/// Longest-common-subsequence alignment of two sequences. Returns matched
/// index pairs in increasing order. Ties prefer consuming `a` first when
/// skipping, so the alignment is deterministic.
template <typename T, typename Eq = std::equal_to<T>>
std::vector<std::pair<std::size_t, std::size_t>> lcs_align(std::span<const T> a, std::span<const T> b,
                                                           Eq eq = {}) {
  const std::size_t n = a.size(), m = b.size();
  // suffix table: len[i][j] = LCS length of a[i..] and b[j..]
  std::vector<std::size_t> len((n + 1) * (m + 1), 0);
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return len[i * (m + 1) + j]; };
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = m; j-- > 0;) {
      at(i, j) = eq(a[i], b[j]) ? at(i + 1, j + 1) + 1 : std::max(at(i + 1, j), at(i, j + 1));
    }
  }
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t i = 0, j = 0;
  while (i < n && j < m) {
    if (eq(a[i], b[j]) && at(i, j) == at(i + 1, j + 1) + 1) {
      out.emplace_back(i++, j++);
    } else if (at(i + 1, j) >= at(i, j + 1)) {
      ++i;
    } else {
      ++j;
    }
  }
  return out;
}

}  // namespace jitvd
