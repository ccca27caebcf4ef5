#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <vector>

namespace tropdeg {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Row-major dense matrix of exact rationals.
struct RationalMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<Rational> data;

  RationalMatrix() = default;
  RationalMatrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c) {}

  Rational& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
  const Rational& operator()(int i, int j) const {
    return data[static_cast<std::size_t>(i) * cols + j];
  }

  friend bool operator==(const RationalMatrix&, const RationalMatrix&) = default;
};

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

inline Integer numerator_of(const Rational& q) { return boost::multiprecision::numerator(q); }
inline Integer denominator_of(const Rational& q) { return boost::multiprecision::denominator(q); }

/// Exact conversion; every finite double is a dyadic rational.
Rational rational_from_double(double x);

std::string to_string(const Rational& q);

}  // namespace tropdeg
