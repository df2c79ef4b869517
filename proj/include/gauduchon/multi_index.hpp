#pragma once

// Multi-index bookkeeping for (p,q)-form bases.  A basis monomial is
// dz_I ^ dzbar_J with I, J strictly increasing index sets encoded as bitmasks
// over the first n bits.  Basis order is lexicographic by bitmask value,
// anti-holomorphic index fastest.

#include <cstdint>
#include <vector>

#include "gauduchon/errors.hpp"

namespace gauduchon {

using mask_t = std::uint32_t;

constexpr int kMaxDim = 8;

inline int popcount(mask_t m) { return __builtin_popcount(m); }

inline long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

inline long factorial(int n) {
  long r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// All bitmasks over n bits with the given popcount, ascending by value.
inline std::vector<mask_t> subsets(int n, int p) {
  std::vector<mask_t> out;
  for (mask_t m = 0; m < (mask_t(1) << n); ++m)
    if (popcount(m) == p) out.push_back(m);
  return out;
}

// Position of `m` within subsets(n, popcount(m)).
inline int subset_index(int n, mask_t m) {
  int p = popcount(m), idx = 0;
  for (mask_t x = 0; x < m; ++x)
    if (popcount(x) == p) ++idx;
  return idx;
}

// Sign of sorting the concatenation (a increasing, b increasing) into one
// increasing sequence; a and b must be disjoint.
inline int merge_sign(mask_t a, mask_t b) {
  int swaps = 0;
  for (int i = 0; i < kMaxDim; ++i)
    if (b & (mask_t(1) << i)) swaps += popcount(a >> (i + 1));
  return (swaps & 1) ? -1 : 1;
}

}  // namespace gauduchon
