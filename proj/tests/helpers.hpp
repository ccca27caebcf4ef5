#pragma once

#include "tropdeg/error.hpp"
#include "tropdeg/rational.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <functional>
#include <string>

#ifndef TROPDEG_FIXTURES
#define TROPDEG_FIXTURES "fixtures"
#endif

inline std::string fixture(const std::string& rel) { return std::string(TROPDEG_FIXTURES) + "/" + rel; }

// Expects `fn` to throw tropdeg::Error with the given code.
inline bool throws_code(const std::function<void()>& fn, tropdeg::ErrorCode code) {
  try {
    fn();
  } catch (const tropdeg::Error& e) {
    return e.code() == code;
  }
  return false;
}

inline Eigen::MatrixXd mat(std::initializer_list<std::initializer_list<double>> rows) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double x : row) m(i, j++) = x;
    ++i;
  }
  return m;
}

inline Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

inline tropdeg::RationalMatrix rmat(std::initializer_list<std::initializer_list<long long>> rows) {
  tropdeg::RationalMatrix m(static_cast<int>(rows.size()), static_cast<int>(rows.begin()->size()));
  int i = 0;
  for (const auto& row : rows) {
    int j = 0;
    for (long long x : row) m(i, j++) = tropdeg::Rational(x);
    ++i;
  }
  return m;
}
