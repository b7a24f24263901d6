#include "cascade/approximation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>

namespace cascade {

double wiener_norm(const AmplitudeField& a) {
  double s = 0.0;
  for (const auto& [j, v] : a.amplitudes()) s += std::abs(v);
  return s;
}

namespace {

cplx denoise(cplx z, double floor) { return std::abs(z) < floor ? cplx{} : z; }

}  // namespace

double wiener_error(const AmplitudeField& u, const AmplitudeField& v, double noise_floor) {
  double s = 0.0;
  for (const auto& [j, a] : u.amplitudes()) s += std::abs(denoise(a, noise_floor) - denoise(v.get(j), noise_floor));
  for (const auto& [j, b] : v.amplitudes())
    if (!u.contains(j)) s += std::abs(denoise(b, noise_floor));
  return s;
}

double wiener_error(const Spectrum& u, const BoxIndexer& box, std::span<const cplx> v, double noise_floor) {
  if (v.size() != box.size()) throw Error("wiener_error: box size mismatch");
  double s = 0.0;
  const auto uv = u.values();
  for (std::size_t i = 0; i < uv.size(); ++i) {
    const ModeIndex j = u.mode(i);
    const cplx vj = box.contains(j) ? v[box.index(j)] : cplx{};
    s += std::abs(denoise(uv[i], noise_floor) - denoise(vj, noise_floor));
  }
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!u.resolves(box.mode(i))) s += std::abs(denoise(v[i], noise_floor));
  return s;
}

std::vector<cplx> interpolate(const Trajectory& traj, double slow_time) {
  const auto& ts = traj.times;
  const std::size_t n = ts.size();
  if (n == 0) throw Error("interpolate: empty trajectory");
  const double span = ts.back() - ts.front();
  const double slack = 1e-9 * std::max(1.0, std::abs(span));
  if (slow_time < ts.front() - slack || slow_time > ts.back() + slack) {
    std::ostringstream msg;
    msg << "interpolate: slow time " << slow_time << " outside trajectory range [" << ts.front() << ", "
        << ts.back() << "]";
    throw Error(msg.str());
  }
  slow_time = std::clamp(slow_time, ts.front(), ts.back());
  const auto hi = std::lower_bound(ts.begin(), ts.end(), slow_time);
  const std::size_t pos = std::size_t(hi - ts.begin());
  if (pos < n && ts[pos] == slow_time) return traj.states[pos];
  if (n < 4) throw Error("interpolate: need at least four snapshots");

  // nodes pos-2 .. pos+1, shifted to stay inside the table
  std::size_t first = pos >= 2 ? pos - 2 : 0;
  if (first + 4 > n) first = n - 4;
  double w[4];
  for (std::size_t a = 0; a < 4; ++a) {
    double num = 1.0;
    double den = 1.0;
    for (std::size_t b = 0; b < 4; ++b) {
      if (a == b) continue;
      num *= slow_time - ts[first + b];
      den *= ts[first + a] - ts[first + b];
    }
    w[a] = num / den;
  }
  std::vector<cplx> out(traj.states[first].size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = w[0] * traj.states[first][i] + w[1] * traj.states[first + 1][i] + w[2] * traj.states[first + 2][i] +
             w[3] * traj.states[first + 3][i];
  }
  return out;
}

std::vector<cplx> build_v_eps_dense(const ApproximantInput& input, double t) {
  if (!input.trajectory) throw Error("build_v_eps: no trajectory");
  if (!(input.epsilon > 0.0)) throw Error("build_v_eps: epsilon must be positive");
  std::vector<cplx> v = interpolate(*input.trajectory, input.epsilon * t);
  const BoxIndexer box(input.trajectory->radius);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == cplx{}) continue;
    v[i] *= std::polar(1.0, -t * double(norm_sq(box.mode(i))));
  }
  return v;
}

AmplitudeField build_v_eps(const ApproximantInput& input, double t) {
  const auto dense = build_v_eps_dense(input, t);
  const BoxIndexer box(input.trajectory->radius);
  AmplitudeField out(box.radius());
  for (std::size_t i = 0; i < dense.size(); ++i)
    if (dense[i] != cplx{}) out.set(box.mode(i), dense[i]);
  return out;
}

double log_log_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("log_log_slope: need two or more points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= double(x.size());
  my /= double(y.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

ConvergenceStudy convergence_study(std::span<const double> epsilons, const AmplitudeField& datum,
                                   const ConvergenceSettings& settings) {
  const ResonantSystem system(settings.resonant_radius, settings.lambda);
  IntegrateOptions opts;
  opts.t_final = settings.slow_horizon;
  opts.dt = settings.resonant_dt;
  opts.leak_tolerance = settings.leak_tolerance;
  const Trajectory traj = integrate(system, datum, opts);
  return convergence_study(epsilons, datum, settings, traj);
}

ConvergenceStudy convergence_study(std::span<const double> epsilons, const AmplitudeField& datum,
                                   const ConvergenceSettings& settings, const Trajectory& trajectory) {
  if (epsilons.empty()) throw Error("convergence_study: no epsilon values");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0)) throw Error("convergence_study: epsilon must be positive");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1])) throw Error("convergence_study: epsilons must decrease");
  }
  if (trajectory.times.empty() || trajectory.times.back() < settings.slow_horizon * (1.0 - 1e-12))
    throw Error("convergence_study: trajectory shorter than the slow horizon");

  const Spectrum u0 = to_spectrum(settings.k, datum);
  const BoxIndexer box(trajectory.radius);
  ConvergenceStudy study;
  study.reports.resize(epsilons.size());
  std::vector<std::exception_ptr> failures(epsilons.size());
  const auto count = static_cast<std::ptrdiff_t>(epsilons.size());

#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t e = 0; e < count; ++e) {
    try {
      const double eps = epsilons[std::size_t(e)];
      const double fast_horizon = settings.slow_horizon / eps;
      NlsParams p;
      p.lambda = settings.lambda;
      p.coupling = eps;
      p.k = settings.k;
      p.splitting = settings.splitting;
      const auto steps = static_cast<long long>(std::ceil(fast_horizon / settings.tau - 1e-9));
      p.tau = fast_horizon / double(steps);
      p.t_final = fast_horizon;
      p.record_stride = int(std::max<long long>(1, steps / std::max(1, settings.records)));

      ErrorReport& report = study.reports[std::size_t(e)];
      report.epsilon = eps;
      const ApproximantInput input{&trajectory, eps};
      evolve(u0, p, {}, [&](double t, const Spectrum& s) {
        const double err = wiener_error(s, box, build_v_eps_dense(input, t));
        report.times.push_back(t);
        report.wiener_errors.push_back(err);
        report.sup_error = std::max(report.sup_error, err);
      });
    } catch (...) {
      failures[std::size_t(e)] = std::current_exception();
    }
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);

  if (study.reports.size() >= 2) {
    std::vector<double> eps, sup;
    for (const auto& r : study.reports) {
      eps.push_back(r.epsilon);
      sup.push_back(r.sup_error);
    }
    study.observed_order = log_log_slope(eps, sup);
    for (std::size_t i = 1; i < sup.size(); ++i) study.error_ratios.push_back(sup[i] / sup[i - 1]);
  }
  return study;
}

}  // namespace cascade
