#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cascade/resonant_system.hpp"
#include "cascade/spectral_nls.hpp"
#include "cascade/taylor.hpp"

namespace cascade {

/// All series hold NLS-gauge coefficients u_j(t), free phase e^{-it|j|^2}
/// included; the growth laws below are tested on the profile
/// u_j(t) e^{it|j|^2}.

/// a_j(eps t) e^{-it|j|^2} from a resonant trajectory, on the fast time axis
/// t = s / eps. No transform round-off here, so the noise floor is 0.
ModeSeriesSet series_from_trajectory(const Trajectory& traj, std::span<const ModeIndex> modes, double epsilon);

/// 2 / eps^(1 - gamma / (|j|^2 - 1)). Requires |j|^2 >= 2.
double layer_time(double epsilon, double gamma, ModeIndex j);

/// alpha * log(1/eps)^theta, for 0 < theta < 1/4.
double spectral_localization_bound(double epsilon, double alpha, double theta);

/// |u_j(t)| by linear interpolation between records. Throws if t lies
/// outside the recorded range.
double amplitude_at(const ModeSeriesSet& s, ModeIndex j, double t);

struct PowerLawFit {
  bool ignited = false;
  double exponent = 0.0;
  cplx coefficient;
  cplx mean_coefficient;
  int samples = 0;
};

/// Fits u_j(t) ~ c (eps t)^p on the slow-time window [slow_lo, slow_hi],
/// sampled geometrically (equal weight per octave). The exponent is the
/// least-squares slope of log|u_j| on log(eps t). The coefficient is the
/// intercept at eps t = 0 of a straight-line fit of the profile over
/// (eps t)^p against eps t; the plain window mean is kept alongside. A
/// window touching the noise floor gives ignited = false.
PowerLawFit amplitude_law_fit(const ModeSeriesSet& s, ModeIndex j, double epsilon, double slow_lo, double slow_hi,
                              int samples_per_octave = 8);

struct IgnitionCheck {
  bool ignited = false;
  bool pass = false;
  double layer_time = 0.0;
  double threshold = 0.0;  // eps^gamma / 4
  double amplitude = 0.0;  // |u_j(layer_time)|
  double margin = 0.0;     // amplitude / threshold
};

/// Theorem threshold test at the layer time of j. Throws if |j|^2 < 2 or if
/// the series stops before the layer time.
IgnitionCheck ignition_check(const ModeSeriesSet& s, ModeIndex j, double epsilon, double gamma);

/// First recorded time with |u_j| >= threshold, if any.
std::optional<double> ignition_time(const ModeSeriesSet& s, ModeIndex j, double threshold);

struct IgnitionScan {
  ModeIndex mode;
  std::vector<double> epsilons;  // scanned values the trajectory covers, descending
  std::vector<double> margins;   // |a_j| at the layer time over eps^gamma / 4
  /// Largest scanned eps at which ignition holds for it and every smaller
  /// scanned eps.
  std::optional<double> largest_passing;
};

/// Ignition margins of j over a range of eps from one resonant trajectory:
/// the layer time maps to slow time 2 eps^(gamma / (|j|^2 - 1)), so one run
/// serves every eps.
IgnitionScan ignition_scan(const Trajectory& traj, ModeIndex j, double gamma, std::span<const double> epsilons);

struct RemainderConstants {
  double c0 = 0.0;
  double c = 0.0;
};

/// Smallest constants for which
///   |u_j(t) e^{it|j|^2} - c(n) (eps t)^alpha(n)| <= (C0 eps t)^(alpha(n)+1) + C eps
/// holds at every record of every extremal mode in the set with
/// generation <= max_generation (modes never above the noise floor impose
/// nothing). Without `c0`, C = 0 and C0 absorbs everything, which is the
/// right split for resonant-system series. With `c0` fixed, C takes the
/// rest.
RemainderConstants remainder_constant_fit(const ModeSeriesSet& s, double epsilon, int lambda, int max_generation = 3,
                                          std::optional<double> c0 = std::nullopt);

struct EnvelopeCheck {
  bool holds = true;
  double worst_ratio = 0.0;  // max residual / bound
  std::size_t samples = 0;
};

EnvelopeCheck theorem_envelope(const ModeSeriesSet& s, double epsilon, int lambda, const RemainderConstants& k,
                               int max_generation);

struct CascadeSettings {
  double epsilon = 1e-3;
  int lambda = 1;
  double gamma = 0.5;
  double theta = 0.2;
  double alpha = 1.0;
  int max_generation = 3;
  /// Power-law fits are meaningful only where the series follows the
  /// resonant system closely (resonant series, or NLS with eps t well
  /// above eps).
  bool fit_checks = true;
  double fit_window_lo = 1e-3;
  double fit_window_hi = 1e-2;
  double exponent_rel_tol = 0.05;
  double coefficient_rel_tol = 0.02;
  double coefficient_phase_tol = 0.05;
};

struct CascadeModeRecord {
  ModeIndex mode;
  int generation = 0;
  std::int64_t expected_exponent = 0;
  PowerLawFit fit;
  cplx expected_coefficient;
  std::optional<double> ignition_time;
  std::optional<IgnitionCheck> ignition;  // absent for n = 0 or short series
  bool within_localization = false;
  bool exponent_pass = true;
  bool coefficient_pass = true;

  bool pass() const;
};

struct CascadeReport {
  CascadeSettings settings;
  double localization_bound = 0.0;
  RemainderConstants constants;
  std::vector<CascadeModeRecord> modes;

  bool pass() const;
  std::string to_json() const;
  std::string to_table() const;
};

/// Extremal modes of generations 0..max_generation, in generation order.
std::vector<ModeIndex> extremal_watch_list(int max_generation);

CascadeReport build_cascade_report(const ModeSeriesSet& s, const CascadeSettings& settings,
                                   std::optional<RemainderConstants> constants = std::nullopt);

}  // namespace cascade
