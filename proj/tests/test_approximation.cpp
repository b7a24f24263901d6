#include <doctest.h>

#include <cmath>

#include "cascade/approximation.hpp"

using namespace cascade;

namespace {

// Trajectory of a single mode following a cubic in slow time.
Trajectory cubic_trajectory(int radius, ModeIndex j, int snapshots) {
  const BoxIndexer box(radius);
  Trajectory t;
  t.radius = radius;
  for (int k = 0; k < snapshots; ++k) {
    const double s = 0.1 * k;
    t.times.push_back(s);
    std::vector<cplx> state(box.size());
    state[box.index(j)] = {1.0 + s * s * s, -s};
    t.states.push_back(std::move(state));
  }
  return t;
}

}  // namespace

TEST_CASE("wiener norm and error") {
  AmplitudeField u;
  u.set({0, 0}, {3.0, 4.0});
  u.set({1, 0}, 1.0);
  AmplitudeField v;
  v.set({0, 0}, {3.0, 0.0});
  v.set({0, 1}, {0.0, -2.0});
  CHECK(wiener_norm(u) == 6.0);
  CHECK(wiener_error(u, v) == 4.0 + 1.0 + 2.0);
  CHECK(wiener_error(u, u) == 0.0);

  AmplitudeField noisy = u;
  noisy.set({5, 5}, 1e-15);
  CHECK(wiener_error(noisy, u) == 0.0);
  CHECK(wiener_error(noisy, u, 0.0) == 1e-15);
}

TEST_CASE("wiener error between a grid spectrum and a box field") {
  const BoxIndexer box(5);
  std::vector<cplx> v(box.size());
  v[box.index({1, 1})] = 2.0;
  v[box.index({5, 0})] = 0.5;  // not resolved on K = 8
  Spectrum s(8);
  s.at({1, 1}) = 1.5;
  s.at({-4, 0}) = 0.25;  // v is zero there
  CHECK(wiener_error(s, box, v) == doctest::Approx(0.5 + 0.5 + 0.25));
  CHECK_THROWS_AS(wiener_error(s, BoxIndexer(2), v), Error);
}

TEST_CASE("interpolation is exact at snapshots and for cubics") {
  const ModeIndex j{1, -1};
  const Trajectory t = cubic_trajectory(2, j, 11);
  const BoxIndexer box(2);
  for (std::size_t k = 0; k < t.times.size(); ++k) CHECK(interpolate(t, t.times[k]) == t.states[k]);
  for (double s : {0.0123, 0.47, 0.951, 0.99999}) {
    const cplx v = interpolate(t, s)[box.index(j)];
    CHECK(std::abs(v - cplx{1.0 + s * s * s, -s}) < 1e-13);
  }
  CHECK_THROWS_AS(interpolate(t, 1.2), Error);
  CHECK_THROWS_AS(interpolate(t, -0.1), Error);
  CHECK_THROWS_AS(interpolate(cubic_trajectory(2, j, 3), 0.05), Error);
  CHECK_THROWS_AS(interpolate(Trajectory{}, 0.0), Error);
}

TEST_CASE("approximant carries the free phase of each mode") {
  const ModeIndex j{1, -1};
  const Trajectory t = cubic_trajectory(2, j, 11);
  const double eps = 0.01;
  const ApproximantInput input{&t, eps};
  const double fast = 37.0;
  const AmplitudeField v = build_v_eps(input, fast);
  CHECK(v.size() == 1);
  const double s = eps * fast;
  const cplx expect = cplx{1.0 + s * s * s, -s} * std::polar(1.0, -fast * 2.0);
  CHECK(std::abs(v.get(j) - expect) < 1e-13);
  CHECK_THROWS_AS(build_v_eps(ApproximantInput{nullptr, eps}, 1.0), Error);
  CHECK_THROWS_AS(build_v_eps(ApproximantInput{&t, 0.0}, 1.0), Error);
}

TEST_CASE("log-log slope") {
  const std::vector<double> x{1.0, 2.0, 4.0, 8.0};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, 1.7));
  CHECK(log_log_slope(x, y) == doctest::Approx(1.7).epsilon(1e-12));
  CHECK_THROWS_AS(log_log_slope(std::vector<double>{1.0}, std::vector<double>{1.0}), Error);
}

TEST_CASE("convergence study: closed square at small scale") {
  ConvergenceSettings s;
  s.slow_horizon = 0.1;
  s.k = 16;
  s.tau = 5e-3;
  s.records = 20;
  s.resonant_radius = 3;
  s.resonant_dt = 1e-3;
  const std::vector<double> eps{0.1, 0.05};
  const ConvergenceStudy study = convergence_study(eps, nonresonant_square_datum(3), s);
  REQUIRE(study.reports.size() == 2);
  CHECK(study.error_ratios.size() == 1);
  for (const auto& r : study.reports) {
    CHECK(r.sup_error > 0.0);
    CHECK(r.sup_error < 20.0 * r.epsilon);
    CHECK(r.times.back() == doctest::Approx(s.slow_horizon / r.epsilon));
  }
  CHECK(study.observed_order > 0.5);

  CHECK_THROWS_AS(convergence_study(std::vector<double>{0.05, 0.1}, nonresonant_square_datum(3), s), Error);
  CHECK_THROWS_AS(convergence_study(std::vector<double>{}, nonresonant_square_datum(3), s), Error);
}
