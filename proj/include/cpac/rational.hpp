#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

#include "cpac/errors.hpp"

namespace cpac {

using Nat = std::uint64_t;

// Arbitrary-precision integers and rationals. Every probability and error
// value in the workbench is an exact rational; floating point never enters
// any comparison against a strict inequality threshold.
using BigNat = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Canonical serialized form: "num/den" in lowest terms, den >= 1, including
// "3/1" for integers. cpp_rational keeps values normalized.
inline std::string rational_to_string(const Rational& r) {
  return numerator(r).str() + "/" + denominator(r).str();
}

inline Rational rational_from_string(const std::string& s) {
  const auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(BigNat(s));
    const BigNat num(s.substr(0, slash));
    const BigNat den(s.substr(slash + 1));
    if (den <= 0) throw ParseError("rational denominator must be positive: " + s);
    return Rational(num, den);
  } catch (const std::runtime_error& e) {
    throw ParseError("bad rational '" + s + "': " + e.what());
  }
}

// Floor of the integer square root.
inline BigNat isqrt(const BigNat& n) { return boost::multiprecision::sqrt(n); }

// A rational upper bound on sqrt(r) for r >= 0:
//   sqrt(p/q) = sqrt(p*q)/q <= ceil(sqrt(p*q))/q.
inline Rational sqrt_upper_bound(const Rational& r) {
  if (r < 0) throw Error("sqrt_upper_bound of negative rational");
  const BigNat pq = numerator(r) * denominator(r);
  BigNat root = isqrt(pq);
  if (root * root < pq) ++root;
  return Rational(root, denominator(r));
}

}  // namespace cpac
