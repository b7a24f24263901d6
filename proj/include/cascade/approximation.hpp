#pragma once

#include <span>
#include <vector>

#include "cascade/resonant_system.hpp"
#include "cascade/spectral_nls.hpp"

namespace cascade {

/// Coefficients below this are treated as FFT round-off in Wiener sums.
inline constexpr double kWienerNoiseFloor = 1e-14;

double wiener_norm(const AmplitudeField& a);

/// ||u - v||_W over the union of supports; entries of either field with
/// modulus below `noise_floor` count as zero.
double wiener_error(const AmplitudeField& u, const AmplitudeField& v, double noise_floor = kWienerNoiseFloor);

/// Same on a grid spectrum against a dense box field; box modes the grid
/// does not resolve contribute |v_j|.
double wiener_error(const Spectrum& u, const BoxIndexer& box, std::span<const cplx> v,
                    double noise_floor = kWienerNoiseFloor);

/// a(s) from trajectory snapshots by four-point Lagrange interpolation in
/// slow time; exact at snapshot times. Throws outside the covered range.
std::vector<cplx> interpolate(const Trajectory& traj, double slow_time);

/// v^eps(t) = sum_j a_j(eps t) e^{i j.x - i t |j|^2}, in coefficient form.
struct ApproximantInput {
  const Trajectory* trajectory = nullptr;
  double epsilon = 0.0;
};

std::vector<cplx> build_v_eps_dense(const ApproximantInput& input, double t);
AmplitudeField build_v_eps(const ApproximantInput& input, double t);

struct ErrorReport {
  double epsilon = 0.0;
  std::vector<double> times;  // fast time
  std::vector<double> wiener_errors;
  double sup_error = 0.0;

  double fitted_constant() const { return sup_error / epsilon; }
};

struct ConvergenceSettings {
  double slow_horizon = 0.5;
  int lambda = 1;
  int k = 64;
  double tau = 1e-3;
  Splitting splitting = Splitting::strang;
  /// NLS snapshots per run compared against v^eps.
  int records = 200;
  int resonant_radius = 8;
  double resonant_dt = 1e-3;
  double leak_tolerance = 1e-8;
};

struct ConvergenceStudy {
  std::vector<ErrorReport> reports;
  /// Slope of log sup_error against log eps.
  double observed_order = 0.0;
  /// sup_error(eps_{i+1}) / sup_error(eps_i).
  std::vector<double> error_ratios;
};

/// Runs the rescaled NLS to t = T/eps for each eps and compares with v^eps
/// built from one resonant trajectory on [0, T]. Runs for different eps
/// proceed in parallel.
ConvergenceStudy convergence_study(std::span<const double> epsilons, const AmplitudeField& datum,
                                   const ConvergenceSettings& settings);

/// Same study against a trajectory supplied by the caller.
ConvergenceStudy convergence_study(std::span<const double> epsilons, const AmplitudeField& datum,
                                   const ConvergenceSettings& settings, const Trajectory& trajectory);

/// Least-squares slope of log(y) on log(x).
double log_log_slope(std::span<const double> x, std::span<const double> y);

}  // namespace cascade
