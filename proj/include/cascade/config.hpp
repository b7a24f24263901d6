#pragma once

#include <string>
#include <vector>

#include "cascade/amplitude_field.hpp"
#include "cascade/lattice.hpp"
#include "cascade/spectral_nls.hpp"

namespace cascade {

enum class RunMode { resonances, evolve_resonant, evolve_nls, compare, cascade_report, figure1, figure2 };

std::string to_string(RunMode m);
RunMode parse_run_mode(const std::string& s);

enum class DatumKind { five_mode, square, custom };

std::string to_string(DatumKind d);
DatumKind parse_datum_kind(const std::string& s);

/// Original form runs coupling 1 on delta*u0; rescaled form runs coupling
/// eps = delta^2 on u0.
enum class NlsForm { delta, epsilon };

std::string to_string(NlsForm f);
NlsForm parse_nls_form(const std::string& s);

struct DatumEntry {
  ModeIndex mode;
  cplx value;

  bool operator==(const DatumEntry&) const = default;
};

/// Every key of the INI schema. Field defaults are the documented defaults;
/// docs/formats.md lists them with their units.
struct ExperimentConfig {
  struct Run {
    RunMode mode = RunMode::figure1;
    std::string out_dir = "out";
    bool deterministic = true;

    bool operator==(const Run&) const = default;
  } run;

  struct Datum {
    DatumKind kind = DatumKind::five_mode;
    /// Used when kind = custom.
    std::vector<DatumEntry> entries;

    bool operator==(const Datum&) const = default;
  } datum;

  struct Nls {
    NlsForm form = NlsForm::delta;
    double delta = 0.0158;
    int lambda = 1;
    double tau = 1e-3;
    int k = 128;
    double t_final = 4000.0;  // fast time
    int record_stride = 100;
    Splitting splitting = Splitting::strang;
    Dealias dealias = Dealias::off;
    double mass_tolerance = 1e-10;

    bool operator==(const Nls&) const = default;
  } nls;

  struct Resonant {
    int radius = 8;
    double dt = 1e-3;
    double t_final = 1.0;  // slow time
    int stride = 10;
    double leak_tolerance = 1e-8;
    double conservation_tolerance = 1e-8;

    bool operator==(const Resonant&) const = default;
  } resonant;

  struct Resonances {
    int support_radius = 2;
    std::vector<ModeIndex> targets{{1, 1}};
    bool oracle_check = true;

    bool operator==(const Resonances&) const = default;
  } resonances;

  struct Compare {
    std::vector<double> epsilons{0.04, 0.02, 0.01};
    double slow_horizon = 0.5;
    int k = 64;
    int records = 200;
    double order_min = 0.8;
    double order_max = 1.2;
    double ratio_min = 0.3;
    double ratio_max = 0.8;

    bool operator==(const Compare&) const = default;
  } compare;

  struct Cascade {
    double epsilon = 1e-4;
    double gamma = 0.5;
    double theta = 0.2;
    double alpha = 1.0;
    int max_generation = 3;
    bool checks = true;
    double slow_horizon = 2.0;
    /// RK4 step up to slow time 2 * 1e-2, where the power laws are fitted.
    double fit_dt = 1e-4;
    /// Empty means the extremal modes up to max_generation.
    std::vector<ModeIndex> watch;

    bool operator==(const Cascade&) const = default;
  } cascade;

  bool operator==(const ExperimentConfig&) const = default;

  /// Nonlinear parameter: delta^2.
  double epsilon() const { return nls.delta * nls.delta; }
};

/// Parses INI text. Unknown sections/keys and malformed values throw Error
/// naming the key.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// INI text with every key. `annotate` adds a comment line above each key
/// saying whether the default is a published value or a suite choice.
std::string serialize_config(const ExperimentConfig& c, bool annotate = false);

/// "0,1 1,1 -2,0"
std::vector<ModeIndex> parse_mode_list(const std::string& s);
std::string format_mode_list(const std::vector<ModeIndex>& modes);

/// "j1,j2,re,im" tokens separated by whitespace.
std::vector<DatumEntry> parse_datum_entries(const std::string& s);
std::string format_datum_entries(const std::vector<DatumEntry>& entries);

/// u0 of the configured datum, before any delta factor.
AmplitudeField initial_datum(const ExperimentConfig& c, int truncation_radius = AmplitudeField::kUnbounded);

/// Modes the configured mode will record.
std::vector<ModeIndex> watch_modes(const ExperimentConfig& c);

/// Substitutes the desk-scale parameters for the figure modes:
/// eps = 0.02 (delta = sqrt(0.02)), K = 64, t up to 1/eps.
ExperimentConfig desk_scale(const ExperimentConfig& c);

struct Diagnostic {
  std::string key;
  std::string message;
};

/// Empty iff run() accepts the config.
std::vector<Diagnostic> validate(const ExperimentConfig& c);

}  // namespace cascade
