#include "cascade/taylor.hpp"

#include <cmath>

#include "cascade/lattice.hpp"

namespace cascade {

namespace {

constexpr int kExactLimit = 11;

void check_generation(int n) {
  if (n < 0) throw Error("taylor: negative generation index");
  if (n > 62) throw Error("taylor: generation index too large");
}

}  // namespace

std::complex<double> ExactCoefficient::evaluate(int lambda) const {
  double value = factor.convert_to<double>();
  if (odd_in_lambda) value *= lambda;
  return imaginary ? std::complex<double>{0.0, value} : std::complex<double>{value, 0.0};
}

std::int64_t taylor_exponent(int n) {
  check_generation(n);
  return (std::int64_t{1} << n) - 1;
}

ExactCoefficient taylor_coefficient_exact(int n) {
  check_generation(n);
  ExactCoefficient c{Rational(1), false, false};
  for (int k = 1; k <= n; ++k) {
    // square: (f i^a lam^b)^2 = f^2 (-1)^a, then multiply by -2 i lam / (2^k - 1)
    Rational sq = c.factor * c.factor;
    if (c.imaginary) sq = -sq;
    c.factor = Rational(-2) * sq / Rational((std::int64_t{1} << k) - 1);
    c.imaginary = true;
    c.odd_in_lambda = true;
  }
  return c;
}

ExactCoefficient taylor_coefficient_closed_form(int n) {
  check_generation(n);
  if (n < 2) throw Error("taylor_coefficient_closed_form: defined for n >= 2");
  using boost::multiprecision::cpp_int;
  const cpp_int numerator = cpp_int(1) << ((std::size_t{1} << n) - 1);
  cpp_int denominator = 1;
  for (int k = 1; k <= n; ++k) {
    const cpp_int base = (cpp_int(1) << k) - 1;
    denominator *= boost::multiprecision::pow(base, unsigned(1u << (n - k)));
  }
  return {Rational(numerator, denominator), true, true};
}

double taylor_coefficient_log10_abs(int n) {
  check_generation(n);
  double log_abs = 0.0;
  for (int k = 1; k <= n; ++k)
    log_abs = std::log10(2.0) + 2.0 * log_abs - std::log10(std::ldexp(1.0, k) - 1.0);
  return log_abs;
}

std::complex<double> taylor_coefficient(int n, int lambda) {
  check_generation(n);
  if (lambda != 1 && lambda != -1) throw Error("taylor_coefficient: lambda must be +1 or -1");
  if (n > kExactLimit) return {};
  return taylor_coefficient_exact(n).evaluate(lambda);
}

TaylorLaw taylor_law(int n, int lambda) {
  return {n, taylor_exponent(n), taylor_coefficient(n, lambda), lambda, taylor_coefficient_log10_abs(n)};
}

}  // namespace cascade
