#include "cascade/cascade_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "cascade/approximation.hpp"

namespace cascade {

ModeSeriesSet series_from_trajectory(const Trajectory& traj, std::span<const ModeIndex> modes, double epsilon) {
  if (!(epsilon > 0.0)) throw Error("series_from_trajectory: epsilon must be positive");
  const BoxIndexer box(traj.radius);
  ModeSeriesSet out;
  out.modes.assign(modes.begin(), modes.end());
  out.values.resize(modes.size());
  out.noise_floor = 0.0;
  for (const double s : traj.times) out.times.push_back(s / epsilon);
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const ModeIndex j = modes[i];
    if (!box.contains(j)) {
      std::ostringstream msg;
      msg << "series_from_trajectory: mode " << j << " outside the box of radius " << traj.radius;
      throw Error(msg.str());
    }
    const std::size_t idx = box.index(j);
    const double q = double(norm_sq(j));
    auto& v = out.values[i];
    v.reserve(traj.times.size());
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
      const cplx a = traj.states[k][idx];
      v.push_back(a == cplx{} ? a : a * std::polar(1.0, -out.times[k] * q));
    }
  }
  return out;
}

double layer_time(double epsilon, double gamma, ModeIndex j) {
  const std::int64_t q = norm_sq(j);
  if (q < 2) {
    std::ostringstream msg;
    msg << "layer_time: |j|^2 = " << q << " < 2 for j = " << j << "; initial modes have no layer time";
    throw Error(msg.str());
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error("layer_time: epsilon must lie in (0,1)");
  if (!(gamma > 0.0 && gamma < 1.0)) throw Error("layer_time: gamma must lie in (0,1)");
  return 2.0 / std::pow(epsilon, 1.0 - gamma / double(q - 1));
}

double spectral_localization_bound(double epsilon, double alpha, double theta) {
  if (!(theta > 0.0 && theta < 0.25)) throw Error("spectral_localization_bound: theta must lie in (0, 1/4)");
  if (!(alpha > 0.0)) throw Error("spectral_localization_bound: alpha must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error("spectral_localization_bound: epsilon must lie in (0,1)");
  return alpha * std::pow(std::log(1.0 / epsilon), theta);
}

namespace {

cplx profile(const ModeSeriesSet& s, std::size_t mode, std::size_t k) {
  const cplx u = s.values[mode][k];
  if (u == cplx{}) return u;
  return u * std::polar(1.0, s.times[k] * double(norm_sq(s.modes[mode])));
}

double peak(const std::vector<cplx>& v) {
  double m = 0.0;
  for (const cplx z : v) m = std::max(m, std::abs(z));
  return m;
}

std::size_t nearest_record(const std::vector<double>& times, double t) {
  const auto it = std::lower_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return 0;
  if (it == times.end()) return times.size() - 1;
  const std::size_t hi = std::size_t(it - times.begin());
  return (t - times[hi - 1] <= times[hi] - t) ? hi - 1 : hi;
}

}  // namespace

double amplitude_at(const ModeSeriesSet& s, ModeIndex j, double t) {
  const auto& v = s.series(j);
  const auto& ts = s.times;
  if (ts.empty()) throw Error("amplitude_at: empty series");
  if (t < ts.front() || t > ts.back()) {
    std::ostringstream msg;
    msg << "amplitude_at: t = " << t << " outside recorded range [" << ts.front() << ", " << ts.back() << "]";
    throw Error(msg.str());
  }
  const auto it = std::lower_bound(ts.begin(), ts.end(), t);
  const std::size_t hi = std::size_t(it - ts.begin());
  if (ts[hi] == t || hi == 0) return std::abs(v[hi]);
  const double w = (t - ts[hi - 1]) / (ts[hi] - ts[hi - 1]);
  return (1.0 - w) * std::abs(v[hi - 1]) + w * std::abs(v[hi]);
}

PowerLawFit amplitude_law_fit(const ModeSeriesSet& s, ModeIndex j, double epsilon, double slow_lo, double slow_hi,
                              int samples_per_octave) {
  if (!(slow_lo > 0.0 && slow_hi > slow_lo)) throw Error("amplitude_law_fit: need 0 < window_lo < window_hi");
  if (samples_per_octave < 1) throw Error("amplitude_law_fit: samples_per_octave must be >= 1");
  const std::size_t mode = s.index_of(j);
  if (s.times.empty() || epsilon * s.times.back() < slow_hi * (1.0 - 1e-9)) {
    std::ostringstream msg;
    msg << "amplitude_law_fit: series ends before slow time " << slow_hi;
    throw Error(msg.str());
  }

  std::vector<std::size_t> picks;
  const double octaves = std::log2(slow_hi / slow_lo);
  const int nodes = int(std::floor(octaves * samples_per_octave + 1e-9));
  for (int m = 0; m <= nodes; ++m) {
    const double slow = slow_lo * std::exp2(double(m) / samples_per_octave);
    const std::size_t k = nearest_record(s.times, slow / epsilon);
    if (picks.empty() || picks.back() != k) picks.push_back(k);
  }

  PowerLawFit fit;
  fit.samples = int(picks.size());
  std::vector<double> x, y;
  for (const std::size_t k : picks) {
    const double a = std::abs(s.values[mode][k]);
    if (a <= s.noise_floor || a == 0.0) return fit;
    const double slow = epsilon * s.times[k];
    if (!(slow > 0.0)) throw Error("amplitude_law_fit: window reaches t = 0");
    x.push_back(slow);
    y.push_back(a);
  }
  if (x.size() < 2) throw Error("amplitude_law_fit: window holds fewer than two records");

  fit.ignited = true;
  fit.exponent = log_log_slope(x, y);
  // q(s) = u_j / s^p drifts linearly in s (mostly the mass-driven phase
  // rotation); the intercept of a straight-line fit is the coefficient.
  double ms = 0.0;
  cplx mq{};
  std::vector<cplx> q(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    q[i] = profile(s, mode, picks[i]) / std::pow(x[i], fit.exponent);
    ms += x[i];
    mq += q[i];
  }
  ms /= double(x.size());
  mq /= double(x.size());
  double sxx = 0.0;
  cplx sxq{};
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - ms) * (x[i] - ms);
    sxq += (x[i] - ms) * (q[i] - mq);
  }
  fit.mean_coefficient = mq;
  fit.coefficient = mq - (sxq / sxx) * ms;
  return fit;
}

std::optional<double> ignition_time(const ModeSeriesSet& s, ModeIndex j, double threshold) {
  const auto& v = s.series(j);
  for (std::size_t k = 0; k < v.size(); ++k)
    if (std::abs(v[k]) >= threshold && std::abs(v[k]) > s.noise_floor) return s.times[k];
  return std::nullopt;
}

IgnitionCheck ignition_check(const ModeSeriesSet& s, ModeIndex j, double epsilon, double gamma) {
  IgnitionCheck c;
  c.layer_time = layer_time(epsilon, gamma, j);
  c.threshold = std::pow(epsilon, gamma) / 4.0;
  if (s.times.empty() || s.times.back() < c.layer_time) {
    std::ostringstream msg;
    msg << "ignition_check: series for " << j << " ends at t = " << (s.times.empty() ? 0.0 : s.times.back())
        << " but the layer time is t = " << c.layer_time << "; run to at least that horizon";
    throw Error(msg.str());
  }
  c.amplitude = amplitude_at(s, j, c.layer_time);
  c.ignited = c.amplitude > s.noise_floor;
  c.margin = c.amplitude / c.threshold;
  c.pass = c.ignited && c.amplitude >= c.threshold;
  return c;
}

IgnitionScan ignition_scan(const Trajectory& traj, ModeIndex j, double gamma, std::span<const double> epsilons) {
  const BoxIndexer box(traj.radius);
  if (!box.contains(j)) throw Error("ignition_scan: mode outside the trajectory box");
  std::vector<double> eps(epsilons.begin(), epsilons.end());
  std::sort(eps.begin(), eps.end(), std::greater<>());
  const std::size_t idx = box.index(j);
  const auto& ts = traj.times;

  IgnitionScan out;
  out.mode = j;
  for (const double e : eps) {
    const double slow = e * layer_time(e, gamma, j);
    if (ts.empty() || slow > ts.back()) continue;
    const auto it = std::lower_bound(ts.begin(), ts.end(), slow);
    const std::size_t hi = std::size_t(it - ts.begin());
    double a = std::abs(traj.states[hi][idx]);
    if (hi > 0 && ts[hi] != slow) {
      const double w = (slow - ts[hi - 1]) / (ts[hi] - ts[hi - 1]);
      a = (1.0 - w) * std::abs(traj.states[hi - 1][idx]) + w * a;
    }
    out.epsilons.push_back(e);
    out.margins.push_back(a / (std::pow(e, gamma) / 4.0));
  }
  for (std::size_t k = out.margins.size(); k-- > 0;) {
    if (out.margins[k] < 1.0) break;
    out.largest_passing = out.epsilons[k];
  }
  return out;
}

namespace {

template <class F>
void for_each_extremal_sample(const ModeSeriesSet& s, double epsilon, int lambda, int max_generation, F&& f) {
  for (std::size_t i = 0; i < s.modes.size(); ++i) {
    const int n = extremal_generation(s.modes[i]);
    if (n < 0 || n > max_generation) continue;
    if (peak(s.values[i]) <= s.noise_floor) continue;
    const cplx c = taylor_coefficient(n, lambda);
    const double alpha = double(taylor_exponent(n));
    for (std::size_t k = 0; k < s.times.size(); ++k) {
      const double slow = epsilon * s.times[k];
      const double r = std::abs(profile(s, i, k) - c * std::pow(slow, alpha));
      f(slow, alpha, r);
    }
  }
}

}  // namespace

RemainderConstants remainder_constant_fit(const ModeSeriesSet& s, double epsilon, int lambda, int max_generation,
                                          std::optional<double> c0) {
  if (!(epsilon > 0.0)) throw Error("remainder_constant_fit: epsilon must be positive");
  RemainderConstants out;
  if (!c0) {
    for_each_extremal_sample(s, epsilon, lambda, max_generation, [&](double slow, double alpha, double r) {
      if (slow > 0.0 && r > 0.0) out.c0 = std::max(out.c0, std::pow(r, 1.0 / (alpha + 1.0)) / slow);
    });
    return out;
  }
  out.c0 = *c0;
  for_each_extremal_sample(s, epsilon, lambda, max_generation, [&](double slow, double alpha, double r) {
    out.c = std::max(out.c, (r - std::pow(out.c0 * slow, alpha + 1.0)) / epsilon);
  });
  return out;
}

EnvelopeCheck theorem_envelope(const ModeSeriesSet& s, double epsilon, int lambda, const RemainderConstants& k,
                               int max_generation) {
  EnvelopeCheck out;
  for_each_extremal_sample(s, epsilon, lambda, max_generation, [&](double slow, double alpha, double r) {
    const double bound = std::pow(k.c0 * slow, alpha + 1.0) + k.c * epsilon;
    ++out.samples;
    if (bound > 0.0) out.worst_ratio = std::max(out.worst_ratio, r / bound);
    if (r > bound * (1.0 + 1e-9) + s.noise_floor) {
      out.holds = false;
      if (bound == 0.0) out.worst_ratio = std::numeric_limits<double>::infinity();
    }
  });
  return out;
}

bool CascadeModeRecord::pass() const { return exponent_pass && coefficient_pass && (!ignition || ignition->pass); }

bool CascadeReport::pass() const {
  return std::all_of(modes.begin(), modes.end(), [](const CascadeModeRecord& r) { return r.pass(); });
}

std::vector<ModeIndex> extremal_watch_list(int max_generation) {
  std::vector<ModeIndex> out;
  for (int n = 0; n <= max_generation; ++n)
    for (const ModeIndex j : extremal_modes(n)) out.push_back(j);
  return out;
}

CascadeReport build_cascade_report(const ModeSeriesSet& s, const CascadeSettings& settings,
                                   std::optional<RemainderConstants> constants) {
  CascadeReport report;
  report.settings = settings;
  report.localization_bound = spectral_localization_bound(settings.epsilon, settings.alpha, settings.theta);
  report.constants =
      constants ? *constants : remainder_constant_fit(s, settings.epsilon, settings.lambda, settings.max_generation);

  std::vector<std::size_t> picked;
  for (std::size_t i = 0; i < s.modes.size(); ++i) {
    const int n = extremal_generation(s.modes[i]);
    if (n >= 0 && n <= settings.max_generation) picked.push_back(i);
  }
  report.modes.resize(picked.size());
  std::vector<std::exception_ptr> failures(picked.size());
  const double threshold = std::pow(settings.epsilon, settings.gamma) / 4.0;
  const auto count = static_cast<std::ptrdiff_t>(picked.size());

#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t p = 0; p < count; ++p) {
    try {
      CascadeModeRecord& r = report.modes[std::size_t(p)];
      r.mode = s.modes[picked[std::size_t(p)]];
      r.generation = extremal_generation(r.mode);
      r.expected_exponent = taylor_exponent(r.generation);
      r.expected_coefficient = taylor_coefficient(r.generation, settings.lambda);
      r.within_localization = std::sqrt(double(norm_sq(r.mode))) < report.localization_bound;
      r.ignition_time = ignition_time(s, r.mode, threshold);
      if (r.generation >= 1 && !s.times.empty() &&
          s.times.back() >= layer_time(settings.epsilon, settings.gamma, r.mode))
        r.ignition = ignition_check(s, r.mode, settings.epsilon, settings.gamma);
      if (settings.fit_checks) {
        r.fit = amplitude_law_fit(s, r.mode, settings.epsilon, settings.fit_window_lo, settings.fit_window_hi);
        const double alpha = double(r.expected_exponent);
        const double de = std::abs(r.fit.exponent - alpha);
        r.exponent_pass = r.fit.ignited && (alpha > 0.0 ? de / alpha : de) <= settings.exponent_rel_tol;
        const double mod = std::abs(r.expected_coefficient);
        r.coefficient_pass = r.fit.ignited && mod > 0.0 &&
                             std::abs(std::abs(r.fit.coefficient) - mod) / mod <= settings.coefficient_rel_tol &&
                             std::abs(std::arg(r.fit.coefficient / r.expected_coefficient)) <=
                                 settings.coefficient_phase_tol;
      }
    } catch (...) {
      failures[std::size_t(p)] = std::current_exception();
    }
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);
  return report;
}

namespace {

nlohmann::json complex_json(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }

}  // namespace

std::string CascadeReport::to_json() const {
  using nlohmann::json;
  json root;
  root["epsilon"] = settings.epsilon;
  root["lambda"] = settings.lambda;
  root["gamma"] = settings.gamma;
  root["theta"] = settings.theta;
  root["alpha"] = settings.alpha;
  root["max_generation"] = settings.max_generation;
  root["localization_bound"] = localization_bound;
  root["threshold"] = std::pow(settings.epsilon, settings.gamma) / 4.0;
  root["C0"] = constants.c0;
  root["C"] = constants.c;
  root["fit_checks"] = settings.fit_checks;
  root["fit_window"] = json::array({settings.fit_window_lo, settings.fit_window_hi});
  json rows = json::array();
  for (const auto& r : modes) {
    json m;
    m["mode"] = json::array({r.mode.j1, r.mode.j2});
    m["generation"] = r.generation;
    m["expected_exponent"] = r.expected_exponent;
    m["expected_coefficient"] = complex_json(r.expected_coefficient);
    m["ignited"] = r.fit.ignited;
    if (settings.fit_checks && r.fit.ignited) {
      m["fitted_exponent"] = r.fit.exponent;
      m["fitted_coefficient"] = complex_json(r.fit.coefficient);
    }
    m["ignition_time"] = r.ignition_time ? json(*r.ignition_time) : json(nullptr);
    if (r.ignition) {
      m["layer_time"] = r.ignition->layer_time;
      m["layer_amplitude"] = r.ignition->amplitude;
      m["margin"] = r.ignition->margin;
      m["ignition_pass"] = r.ignition->pass;
    }
    m["within_localization"] = r.within_localization;
    m["exponent_pass"] = r.exponent_pass;
    m["coefficient_pass"] = r.coefficient_pass;
    m["pass"] = r.pass();
    rows.push_back(std::move(m));
  }
  root["modes"] = std::move(rows);
  root["pass"] = pass();
  return root.dump(2) + "\n";
}

std::string CascadeReport::to_table() const {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "eps=%.6g gamma=%.3g theta=%.3g alpha=%.3g  |j| bound=%.4g  C0=%.6g C=%.6g\n",
                settings.epsilon, settings.gamma, settings.theta, settings.alpha, localization_bound, constants.c0,
                constants.c);
  os << line;
  std::snprintf(line, sizeof line, "%-9s %2s %5s %9s %11s %11s %11s %10s %11s %9s  %s\n", "mode", "n", "a(n)",
                "fit exp", "|c(n)|", "fit |c|", "layer t", "threshold", "amplitude", "margin", "verdict");
  os << line;
  for (const auto& r : modes) {
    std::ostringstream m;
    m << r.mode;
    const bool fitted = settings.fit_checks && r.fit.ignited;
    char fe[32] = "-", fc[32] = "-", lt[32] = "-", am[32] = "-", mg[32] = "-";
    if (fitted) {
      std::snprintf(fe, sizeof fe, "%.4f", r.fit.exponent);
      std::snprintf(fc, sizeof fc, "%.5g", std::abs(r.fit.coefficient));
    }
    if (r.ignition) {
      std::snprintf(lt, sizeof lt, "%.5g", r.ignition->layer_time);
      std::snprintf(am, sizeof am, "%.4g", r.ignition->amplitude);
      std::snprintf(mg, sizeof mg, "%.4g", r.ignition->margin);
    }
    std::snprintf(line, sizeof line, "%-9s %2d %5lld %9s %11.5g %11s %11s %10.4g %11s %9s  %s\n", m.str().c_str(),
                  r.generation, static_cast<long long>(r.expected_exponent), fe, std::abs(r.expected_coefficient),
                  fc, lt, std::pow(settings.epsilon, settings.gamma) / 4.0, am, mg,
                  r.pass() ? "pass" : (settings.fit_checks && !r.fit.ignited ? "not ignited" : "FAIL"));
    os << line;
  }
  return os.str();
}

}  // namespace cascade
