#pragma once

#include <cstddef>
#include <vector>

namespace lcr {

/// Binomial coefficient as a double (exact while the result fits in 53 bits).
inline double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  if (k > n - k) k = n - k;
  double c = 1.0;
  for (std::size_t i = 1; i <= k; ++i) c = c * double(n - k + i) / double(i);
  return c;
}

/// Visits every k-subset of {0..n-1} in lexicographic order. The callback gets a
/// const reference to the current sorted index vector.
template <class Fn>
void for_each_combination(std::size_t n, std::size_t k, Fn&& fn) {
  if (k == 0 || k > n) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    fn(static_cast<const std::vector<std::size_t>&>(idx));
    std::size_t pos = k;
    while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
    if (pos == 0) return;
    ++idx[pos - 1];
    for (std::size_t j = pos; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace lcr
