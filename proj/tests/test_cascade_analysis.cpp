#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "cascade/cascade_analysis.hpp"

using namespace cascade;

namespace {

// u_j(t) = c (eps t)^p e^{-it|j|^2} e^{i drift eps t}, sampled densely. The
// drift mimics the mass-driven phase rotation.
ModeSeriesSet power_series(ModeIndex j, cplx c, double p, double eps, double slow_end, double drift = 0.0) {
  ModeSeriesSet s;
  s.modes = {j};
  s.values.resize(1);
  const int n = 4000;
  for (int k = 0; k <= n; ++k) {
    const double slow = slow_end * k / n;
    const double t = slow / eps;
    s.times.push_back(t);
    s.values[0].push_back(c * std::pow(slow, p) * std::polar(1.0, drift * slow) * std::polar(1.0, -t * double(norm_sq(j))));
  }
  return s;
}

Trajectory short_run(int lambda, double horizon, double dt, int radius = 4) {
  const ResonantSystem system(radius, lambda);
  IntegrateOptions o;
  o.t_final = horizon;
  o.dt = dt;
  o.leak_tolerance = 1e-6;
  return integrate(system, five_mode_datum(radius), o);
}

}  // namespace

TEST_CASE("layer times and the localization bound") {
  CHECK(layer_time(1e-4, 0.5, {1, 1}) == doctest::Approx(2.0 / std::pow(1e-4, 0.5)));
  CHECK(layer_time(1e-3, 0.5, {0, 2}) == doctest::Approx(2.0 / std::pow(1e-3, 1.0 - 0.5 / 3.0)));
  CHECK_THROWS_AS(layer_time(1e-3, 0.5, {1, 0}), Error);
  CHECK_THROWS_AS(layer_time(1.5, 0.5, {1, 1}), Error);
  CHECK_THROWS_AS(layer_time(1e-3, 1.0, {1, 1}), Error);

  CHECK(spectral_localization_bound(1e-3, 2.0, 0.2) == doctest::Approx(2.0 * std::pow(std::log(1e3), 0.2)));
  CHECK_THROWS_AS(spectral_localization_bound(1e-3, 1.0, 0.25), Error);
  CHECK_THROWS_AS(spectral_localization_bound(1e-3, 1.0, 0.0), Error);
}

TEST_CASE("amplitude at a time interpolates the modulus") {
  ModeSeriesSet s;
  s.modes = {{1, 1}};
  s.times = {0.0, 1.0, 2.0};
  s.values = {{0.0, cplx{0.0, 2.0}, 4.0}};
  CHECK(amplitude_at(s, {1, 1}, 1.5) == 3.0);
  CHECK(amplitude_at(s, {1, 1}, 1.0) == 2.0);
  CHECK_THROWS_AS(amplitude_at(s, {1, 1}, 2.5), Error);
  CHECK_THROWS_AS(amplitude_at(s, {0, 1}, 1.0), Error);
}

TEST_CASE("power-law fit recovers exponent and coefficient") {
  const cplx c{0.3, -1.1};
  for (double p : {0.0, 1.0, 3.0, 7.0}) {
    const auto s = power_series({2, 2}, c, p, 1e-3, 0.02, 0.8);
    const PowerLawFit f = amplitude_law_fit(s, {2, 2}, 1e-3, 1e-3, 1e-2);
    CAPTURE(p);
    CHECK(f.ignited);
    CHECK(f.exponent == doctest::Approx(p).epsilon(0.01));
    CHECK(std::abs(f.coefficient - c) / std::abs(c) < 0.01);
    CHECK(f.samples > 20);
  }
}

TEST_CASE("power-law fit: silent mode and short series") {
  auto s = power_series({1, 1}, 0.0, 1.0, 1e-3, 0.02);
  CHECK_FALSE(amplitude_law_fit(s, {1, 1}, 1e-3, 1e-3, 1e-2).ignited);
  CHECK_THROWS_AS(amplitude_law_fit(s, {1, 1}, 1e-3, 1e-3, 0.05), Error);
  CHECK_THROWS_AS(amplitude_law_fit(s, {1, 1}, 1e-3, 1e-2, 1e-3), Error);
}

TEST_CASE("ignition check and ignition time") {
  const double eps = 1e-2;
  const auto s = power_series({1, 1}, 1.0, 1.0, eps, 1.0);
  const IgnitionCheck c = ignition_check(s, {1, 1}, eps, 0.5);
  CHECK(c.layer_time == doctest::Approx(20.0));
  CHECK(c.threshold == doctest::Approx(0.025));
  CHECK(c.amplitude == doctest::Approx(0.2).epsilon(1e-6));
  CHECK(c.pass);
  CHECK(c.margin == doctest::Approx(8.0).epsilon(1e-6));
  const auto t = ignition_time(s, {1, 1}, 0.025);
  REQUIRE(t);
  CHECK(*t == doctest::Approx(2.5).epsilon(1e-2));
  CHECK_FALSE(ignition_time(s, {1, 1}, 2.0));

  const auto short_s = power_series({1, 1}, 1.0, 1.0, eps, 0.1);
  CHECK_THROWS_AS(ignition_check(short_s, {1, 1}, eps, 0.5), Error);
}

TEST_CASE("ignition scan over eps from one trajectory") {
  const Trajectory traj = short_run(1, 1.0, 1e-3, 6);
  std::vector<double> eps{1e-2, 1e-3, 1e-4, 1e-6};
  const IgnitionScan sc = ignition_scan(traj, {1, 1}, 0.5, eps);
  // Slow layer time 2 eps^0.5 is at most 0.2, inside the run for every eps.
  CHECK(sc.epsilons.size() == 4);
  CHECK(sc.largest_passing);
  for (std::size_t k = 0; k < sc.margins.size(); ++k) CHECK(sc.margins[k] > 1.0);
  CHECK_THROWS_AS(ignition_scan(traj, {9, 0}, 0.5, eps), Error);
}

TEST_CASE("remainder constants: exact series needs none, perturbed ones are bounded") {
  const cplx c = taylor_coefficient(1, 1);
  const double eps = 1e-3;
  auto s = power_series({1, 1}, c, 1.0, eps, 0.5);
  const RemainderConstants k0 = remainder_constant_fit(s, eps, 1, 1);
  CHECK(k0.c0 < 1e-6);

  // Second-order deviation c s^2 * 0.8 needs C0^2 >= |c| * 0.8.
  s = power_series({1, 1}, c, 1.0, eps, 0.5, 0.8);
  const RemainderConstants k = remainder_constant_fit(s, eps, 1, 1);
  CHECK(k.c0 * k.c0 == doctest::Approx(2.0 * 0.8).epsilon(1e-6));
  CHECK(theorem_envelope(s, eps, 1, k, 1).holds);
  CHECK_FALSE(theorem_envelope(s, eps, 1, {0.5 * k.c0, 0.0}, 1).holds);

  const RemainderConstants split = remainder_constant_fit(s, eps, 1, 1, 0.5 * k.c0);
  CHECK(split.c > 0.0);
  CHECK(theorem_envelope(s, eps, 1, split, 1).holds);
}

TEST_CASE("cascade report on a resonant trajectory") {
  for (int lambda : {1, -1}) {
    const Trajectory traj = short_run(lambda, 0.02, 1e-4);
    CascadeSettings st;
    st.epsilon = 1e-3;
    st.lambda = lambda;
    const auto watch = extremal_watch_list(3);
    const ModeSeriesSet s = series_from_trajectory(traj, watch, st.epsilon);
    CHECK(s.times.back() == doctest::Approx(20.0));
    const CascadeReport r = build_cascade_report(s, st);
    CHECK(r.modes.size() == 16);
    CHECK(r.pass());
    for (const auto& m : r.modes) {
      CHECK(m.exponent_pass);
      CHECK(m.coefficient_pass);
      CHECK_FALSE(m.ignition);  // 20 time units do not reach any layer
    }
    const auto j = nlohmann::json::parse(r.to_json());
    CHECK(j["modes"].size() == 16);
    CHECK(r.to_table().find("(2,2)") != std::string::npos);
  }
}

TEST_CASE("series from trajectory puts back the free phase") {
  const Trajectory traj = short_run(1, 0.01, 1e-3);
  const ModeSeriesSet s = series_from_trajectory(traj, std::vector<ModeIndex>{{1, 1}}, 0.01);
  const BoxIndexer box(4);
  for (std::size_t k = 0; k < s.times.size(); ++k) {
    const cplx a = traj.states[k][box.index({1, 1})];
    CHECK(std::abs(s.values[0][k] - a * std::polar(1.0, -2.0 * s.times[k])) < 1e-15);
  }
  CHECK_THROWS_AS(series_from_trajectory(traj, std::vector<ModeIndex>{{5, 5}}, 0.01), Error);
  CHECK_THROWS_AS(series_from_trajectory(traj, std::vector<ModeIndex>{{1, 1}}, 0.0), Error);
}
