#pragma once

#include <utility>
#include <vector>

#include "cpac/rational.hpp"

namespace cpac {

/*
 * Pairing and list codes used by the Goedel numbering and by the sample
 * encoding of the arithmetization module.
 *
 * Cantor pairing, a bijection N^2 <-> N:
 *
 *     pair(a, b) = (a + b)(a + b + 1)/2 + b
 *
 * Inverse: with w = floor((sqrt(8n + 1) - 1)/2) and t = w(w + 1)/2,
 * b = n - t and a = w - b.
 *
 * List code, a bijection over finite sequences of naturals:
 *
 *     code([])        = 0
 *     code(c :: rest) = pair(c, code(rest)) + 1
 *
 * Decoding is total and terminates because code(rest) < code(c :: rest).
 */

inline BigNat cantor_pair(const BigNat& a, const BigNat& b) {
  const BigNat s = a + b;
  return s * (s + 1) / 2 + b;
}

inline std::pair<BigNat, BigNat> cantor_unpair(const BigNat& n) {
  const BigNat w = (isqrt(8 * n + 1) - 1) / 2;
  const BigNat t = w * (w + 1) / 2;
  const BigNat b = n - t;
  return {w - b, b};
}

inline BigNat encode_list(const std::vector<BigNat>& items) {
  BigNat code = 0;
  for (auto it = items.rbegin(); it != items.rend(); ++it)
    code = cantor_pair(*it, code) + 1;
  return code;
}

inline std::vector<BigNat> decode_list(BigNat code) {
  std::vector<BigNat> items;
  while (code > 0) {
    auto [head, rest] = cantor_unpair(code - 1);
    items.push_back(head);
    code = rest;
  }
  return items;
}

// Narrowing helper for decoded components that must fit a machine word.
inline Nat to_nat_checked(const BigNat& n, const char* what) {
  if (n > BigNat(UINT64_MAX)) throw Error(std::string(what) + " exceeds 64-bit range");
  return static_cast<Nat>(n);
}

}  // namespace cpac
