#include <doctest.h>

#include <cmath>

#include "cascade/lattice.hpp"
#include "cascade/reference.hpp"
#include "cascade/taylor.hpp"

using namespace cascade;
using boost::multiprecision::cpp_int;

namespace {

std::map<ModeIndex, reference::GaussianInteger> unit_datum(const ModeSet& support) {
  std::map<ModeIndex, reference::GaussianInteger> out;
  for (const ModeIndex j : support) out[j] = {1, 0};
  return out;
}

// b = B / p! as exact Gaussian rational parts.
std::pair<Rational, Rational> unscaled(const reference::GaussianInteger& b, int p) {
  cpp_int f = 1;
  for (int k = 2; k <= p; ++k) f *= k;
  return {Rational(b.re, f), Rational(b.im, f)};
}

std::pair<Rational, Rational> parts(const ExactCoefficient& c, int lambda) {
  const Rational v = c.odd_in_lambda ? c.factor * lambda : c.factor;
  return c.imaginary ? std::pair{Rational(0), v} : std::pair{v, Rational(0)};
}

}  // namespace

TEST_CASE("exponents") {
  CHECK(taylor_exponent(0) == 0);
  CHECK(taylor_exponent(1) == 1);
  CHECK(taylor_exponent(3) == 7);
  CHECK(taylor_exponent(10) == 1023);
  CHECK_THROWS_AS(taylor_exponent(-1), Error);
}

TEST_CASE("first coefficients") {
  CHECK(taylor_coefficient_exact(0) == ExactCoefficient{Rational(1), false, false});
  CHECK(taylor_coefficient_exact(1) == ExactCoefficient{Rational(-2), true, true});
  CHECK(taylor_coefficient_exact(2) == ExactCoefficient{Rational(8, 3), true, true});
  CHECK(taylor_coefficient_exact(3) == ExactCoefficient{Rational(128, 63), true, true});
  for (int lambda : {1, -1}) {
    CHECK(taylor_coefficient(1, lambda) == std::complex<double>{0.0, -2.0 * lambda});
    CHECK(std::abs(taylor_coefficient(2, lambda) - std::complex<double>{0.0, 8.0 * lambda / 3.0}) < 1e-15);
    CHECK(std::abs(taylor_coefficient(3, lambda) - std::complex<double>{0.0, 128.0 * lambda / 63.0}) < 1e-15);
  }
  CHECK_THROWS_AS(taylor_coefficient(1, 0), Error);
}

TEST_CASE("product formula agrees with the recursion from n = 2 on") {
  for (int n = 2; n <= 12; ++n) {
    CAPTURE(n);
    CHECK(taylor_coefficient_closed_form(n) == taylor_coefficient_exact(n));
  }
  // At n = 1 the product formula has the wrong sign.
  CHECK_THROWS_AS(taylor_coefficient_closed_form(1), Error);
}

TEST_CASE("log10 |c(n)| tracks the exact value and stays finite far out") {
  for (int n = 0; n <= 11; ++n) {
    const double exact = std::log10(std::abs(taylor_coefficient_exact(n).factor.convert_to<double>()));
    CHECK(taylor_coefficient_log10_abs(n) == doctest::Approx(exact).epsilon(1e-12));
  }
  CHECK(std::isfinite(taylor_coefficient_log10_abs(40)));
  CHECK(taylor_coefficient_log10_abs(40) < -1000.0);
  CHECK(taylor_coefficient(12, 1) == std::complex<double>{});
  const TaylorLaw law = taylor_law(2, -1);
  CHECK(law.alpha_n == 3);
  CHECK(law.c_n.imag() < 0.0);
}

TEST_CASE("exact Taylor series: extremal modes start at order 2^n - 1 with c(n)") {
  for (int lambda : {1, -1}) {
    const reference::TaylorSeriesOracle oracle(unit_datum(five_mode_support()), lambda, 7, 8);
    for (int n = 0; n <= 3; ++n) {
      const int p = int(taylor_exponent(n));
      for (const ModeIndex j : extremal_modes(n)) {
        CAPTURE(lambda);
        CAPTURE(n);
        CHECK(oracle.first_order(j) == p);
        CHECK(unscaled(oracle.scaled(j, p), p) == parts(taylor_coefficient_exact(n), lambda));
      }
    }
  }
}

TEST_CASE("exact Taylor series: order p only reaches N^(p)") {
  const int order = 5;
  const reference::TaylorSeriesOracle oracle(unit_datum(five_mode_support()), 1, order, 8);
  const auto seq = generate_mode_sets(five_mode_support(), order);
  for (const ModeIndex j : oracle.support()) {
    const int p = oracle.first_order(j);
    REQUIRE(p >= 0);
    CHECK(seq.n_sets[std::size_t(p)].contains(j));
  }
}

TEST_CASE("exact Taylor series: closed square rotates as e^{-9it}") {
  const reference::TaylorSeriesOracle oracle(unit_datum(unit_square_support()), 1, 4, 3);
  CHECK(oracle.support() == unit_square_support());
  // (-9i)^p
  const reference::GaussianInteger expect[] = {{1, 0}, {0, -9}, {-81, 0}, {0, 729}, {6561, 0}};
  for (int p = 0; p <= 4; ++p) {
    CHECK(oracle.scaled({1, 0}, p).re == expect[p].re);
    CHECK(oracle.scaled({1, 0}, p).im == expect[p].im);
  }
  CHECK_THROWS_AS(oracle.scaled({1, 0}, 5), Error);
}
