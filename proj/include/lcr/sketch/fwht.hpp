#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>

#include "lcr/error.hpp"

namespace lcr {

inline constexpr bool is_power_of_two(std::size_t n) noexcept { return n > 0 && (n & (n - 1)) == 0; }

inline std::size_t next_power_of_two(std::size_t n) noexcept {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

/// In-place unnormalized Walsh-Hadamard transform (Sylvester ordering).
template <class T>
void fwht_unnormalized(std::span<T> v) {
  const std::size_t len = v.size();
  if (!is_power_of_two(len)) fail(ErrorCode::InvalidDimension, "FWHT length " + std::to_string(len) + " is not a power of two");
  for (std::size_t h = 1; h < len; h <<= 1) {
    for (std::size_t i = 0; i < len; i += 2 * h) {
      for (std::size_t j = i; j < i + h; ++j) {
        const T a = v[j];
        const T b = v[j + h];
        v[j] = a + b;
        v[j + h] = a - b;
      }
    }
  }
}

/// Orthonormal transform H/sqrt(len); applying it twice is the identity.
template <class T>
void fwht(std::span<T> v) {
  fwht_unnormalized(v);
  const T scale = T(1) / std::sqrt(T(v.size()));
  for (auto& x : v) x *= scale;
}

}  // namespace lcr
