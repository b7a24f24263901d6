#pragma once

#include <complex>
#include <cstdint>

#include <boost/multiprecision/cpp_int.hpp>

namespace cascade {

using Rational = boost::multiprecision::cpp_rational;

/// c = factor * i^(imaginary ? 1 : 0) * lambda^(odd_in_lambda ? 1 : 0)
struct ExactCoefficient {
  Rational factor;
  bool imaginary = false;
  bool odd_in_lambda = false;

  bool operator==(const ExactCoefficient&) const = default;
  std::complex<double> evaluate(int lambda) const;
};

/// Leading Taylor exponent of an extremal mode of generation n: 2^n - 1.
std::int64_t taylor_exponent(int n);

/// c(0) = 1, c(n) = -2 i lambda c(n-1)^2 / (2 alpha(n-1) + 1), exactly.
ExactCoefficient taylor_coefficient_exact(int n);

/// Product form, valid for n >= 2:
///   c(n) = i (2 lambda)^(2^n - 1) / prod_{k=1}^{n} (2^k - 1)^(2^(n-k))
ExactCoefficient taylor_coefficient_closed_form(int n);

/// log10 |c(n)| by the recursion in floating point; finite for any n where
/// c(n) itself would underflow a double.
double taylor_coefficient_log10_abs(int n);

/// c(n) as a double; exact rational route up to n = 11, zero beyond
/// (|c(12)| underflows).
std::complex<double> taylor_coefficient(int n, int lambda);

struct TaylorLaw {
  int n = 0;
  std::int64_t alpha_n = 0;
  std::complex<double> c_n;
  int lambda = 1;
  double log10_abs_c = 0.0;
};

TaylorLaw taylor_law(int n, int lambda);

}  // namespace cascade
