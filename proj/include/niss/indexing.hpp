#pragma once

#include <cstdint>
#include <vector>

#include "niss/errors.hpp"

// Multi-indices over F_q^d are stored as a flat lexicographic index with the
// first coordinate most significant. For q = 2 the digit 0 stands for the
// symbol -1 and the digit 1 for +1, so lexicographic order on {-1,+1}^d is
// plain index order.
namespace niss {

inline std::int64_t ipow(std::int64_t base, int exp) {
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

// Size q^d, refusing anything above 2^24 entries.
inline std::size_t table_size(int q, int d) {
  if (q < 1 || d < 0) throw DimensionError("table_size: bad alphabet or block length");
  std::int64_t n = 1;
  for (int i = 0; i < d; ++i) {
    n *= q;
    if (n > (std::int64_t{1} << 24)) throw CapExceeded("table_size: q^d exceeds 2^24");
  }
  return static_cast<std::size_t>(n);
}

// Digit of coordinate i (0-based, 0 = most significant) in a flat index.
inline int digit_at(std::size_t index, int q, int d, int i) {
  for (int k = d - 1; k > i; --k) index /= q;
  return static_cast<int>(index % q);
}

inline std::vector<int> digits_of(std::size_t index, int q, int d) {
  std::vector<int> out(d);
  for (int k = d - 1; k >= 0; --k) {
    out[k] = static_cast<int>(index % q);
    index /= q;
  }
  return out;
}

inline std::size_t index_of(const std::vector<int>& digits, int q) {
  std::size_t idx = 0;
  for (int s : digits) idx = idx * q + s;
  return idx;
}

// Subset S of [d] (bit i set when coordinate i+1 belongs to S, i = 0 for the
// first coordinate) to the q = 2 multi-index with s_i = 1 iff i in S.
inline std::size_t subset_to_index(std::uint32_t mask, int d) {
  std::size_t idx = 0;
  for (int i = 0; i < d; ++i) idx = (idx << 1) | ((mask >> i) & 1u);
  return idx;
}

inline std::uint32_t index_to_subset(std::size_t index, int d) {
  std::uint32_t mask = 0;
  for (int i = d - 1; i >= 0; --i) {
    mask |= static_cast<std::uint32_t>(index & 1u) << i;
    index >>= 1;
  }
  return mask;
}

// Number of nonzero digits, |S| for q = 2.
inline int support_size(std::size_t index, int q) {
  int w = 0;
  while (index) {
    if (index % q) ++w;
    index /= q;
  }
  return w;
}

// Binary symbol of a digit: 0 -> -1, 1 -> +1.
inline double binary_symbol(int digit) { return digit ? 1.0 : -1.0; }

}  // namespace niss
