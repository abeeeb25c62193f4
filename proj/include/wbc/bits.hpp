#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "wbc/errors.hpp"

namespace wbc {

inline constexpr const char* kLibraryVersion = "0.1.0";

// One bit per element, values 0/1. Indices are 0-based throughout the code.
using Bits = std::vector<uint8_t>;
// Channel output symbols; erasure channels use {0, 1, kErasure}.
using Symbols = std::vector<uint8_t>;
// Sorted 0-based index sets.
using IndexList = std::vector<uint32_t>;

inline constexpr uint8_t kErasure = 2;

inline bool is_pow2(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline size_t log2_exact(size_t n) {
  if (!is_pow2(n)) throw DimensionMismatch("block length must be a power of two");
  size_t m = 0;
  while ((size_t{1} << m) < n) ++m;
  return m;
}

inline Bits xor_bits(const Bits& a, const Bits& b) {
  if (a.size() != b.size()) throw LengthMismatch("xor operands differ in length");
  Bits out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] ^ b[i];
  return out;
}

inline Bits concat_bits(const Bits& a, const Bits& b) {
  Bits out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

inline Bits slice_bits(const Bits& v, size_t from, size_t count) {
  if (from + count > v.size()) throw LengthMismatch("slice out of range");
  return Bits(v.begin() + from, v.begin() + from + count);
}

inline Bits gather(const Bits& block, const IndexList& idx) {
  Bits out(idx.size());
  for (size_t i = 0; i < idx.size(); ++i) out[i] = block[idx[i]];
  return out;
}

inline void scatter(Bits& block, const IndexList& idx, const Bits& vals) {
  if (idx.size() != vals.size()) throw LengthMismatch("scatter value count differs from index count");
  for (size_t i = 0; i < idx.size(); ++i) block[idx[i]] = vals[i];
}

inline IndexList union_of(const IndexList& a, const IndexList& b) {
  IndexList out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline IndexList inter_of(const IndexList& a, const IndexList& b) {
  IndexList out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline IndexList diff_of(const IndexList& a, const IndexList& b) {
  IndexList out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline bool contains(const IndexList& a, uint32_t j) {
  return std::binary_search(a.begin(), a.end(), j);
}

inline IndexList complement_of(const IndexList& a, size_t n) {
  IndexList out;
  size_t k = 0;
  for (uint32_t j = 0; j < n; ++j) {
    if (k < a.size() && a[k] == j) {
      ++k;
    } else {
      out.push_back(j);
    }
  }
  return out;
}

inline IndexList take_lowest(const IndexList& a, size_t count, const char* what) {
  if (count > a.size()) throw InfeasiblePlan(std::string("not enough indices for ") + what);
  return IndexList(a.begin(), a.begin() + count);
}

}  // namespace wbc
