#include "cascade/runner.hpp"

#include <omp.h>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "cascade/approximation.hpp"
#include "cascade/cascade_analysis.hpp"
#include "cascade/hash.hpp"
#include "cascade/reference.hpp"
#include "cascade/resonant_system.hpp"

#ifndef CASCADE_VERSION
#define CASCADE_VERSION "unknown"
#endif

namespace cascade {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string join_diagnostics(const std::vector<Diagnostic>& d) {
  std::string out = "invalid configuration:";
  for (const auto& x : d) out += "\n  " + x.key + ": " + x.message;
  return out;
}

std::string num(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  return std::string(buf, std::to_chars(buf, buf + sizeof buf, x).ptr);
}

json mode_json(ModeIndex j) { return json::array({j.j1, j.j2}); }

// Collects artifacts of one run; every file goes through here so the
// manifest can list it.
class OutputDir {
public:
  explicit OutputDir(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

  void write(const std::string& name, const std::string& content) {
    std::ofstream out(root_ / name, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + (root_ / name).string());
    out << content;
    if (!out) throw Error("write failed: " + (root_ / name).string());
    records_.push_back({name, sha256_hex(content), std::uintmax_t(content.size())});
  }

  const fs::path& root() const { return root_; }
  const std::vector<ArtifactRecord>& records() const { return records_; }

private:
  fs::path root_;
  std::vector<ArtifactRecord> records_;
};

struct Outcome {
  std::map<std::string, bool> flags;
  json diagnostics = json::object();
};

std::string series_csv(const ModeSeriesSet& s, const char* time_column, double scale = 1.0) {
  std::ostringstream os;
  os << time_column << ",j1,j2,re,im,abs\n";
  for (std::size_t k = 0; k < s.times.size(); ++k)
    for (std::size_t i = 0; i < s.modes.size(); ++i) {
      const cplx v = s.values[i][k] * scale;
      os << num(s.times[k]) << ',' << s.modes[i].j1 << ',' << s.modes[i].j2 << ',' << num(v.real()) << ','
         << num(v.imag()) << ',' << num(std::abs(v)) << '\n';
    }
  return os.str();
}

void log_line(const RunOptions& o, const std::string& s) {
  if (o.log) *o.log << s << std::endl;
}

Outcome run_resonances(const ExperimentConfig& c, OutputDir& out) {
  Outcome r;
  const ModeSet support = box(c.resonances.support_radius);
  std::string table;
  json targets = json::array();
  bool match = true;
  for (const ModeIndex j : c.resonances.targets) {
    const TripleSet triples = enumerate_resonances(j, support);
    table += format_resonance_table(j, triples);
    json t;
    t["mode"] = mode_json(j);
    t["count"] = triples.size();
    json list = json::array();
    for (const auto& x : triples) list.push_back({x.k.j1, x.k.j2, x.l.j1, x.l.j2, x.m.j1, x.m.j2});
    t["triples"] = std::move(list);
    if (c.resonances.oracle_check) {
      const bool same = triples == reference::brute_force_resonances(j, support);
      t["oracle_match"] = same;
      match = match && same;
    }
    targets.push_back(std::move(t));
  }
  json doc;
  doc["support_radius"] = c.resonances.support_radius;
  doc["targets"] = std::move(targets);
  out.write("resonances.txt", table);
  out.write("resonances.json", doc.dump(2) + "\n");
  if (c.resonances.oracle_check) r.flags["oracle_match"] = match;
  return r;
}

double relative_change(double q, double q0) { return std::abs(q - q0) / std::max(std::abs(q0), 1.0); }

Outcome run_evolve_resonant(const ExperimentConfig& c, OutputDir& out) {
  Outcome r;
  const ResonantSystem system(c.resonant.radius, c.nls.lambda);
  IntegrateOptions opts;
  opts.t_final = c.resonant.t_final;
  opts.dt = c.resonant.dt;
  opts.stride = c.resonant.stride;
  opts.leak_tolerance = c.resonant.leak_tolerance;
  const Trajectory traj = integrate(system, initial_datum(c, c.resonant.radius), opts);

  const auto watch = watch_modes(c);
  ModeSeriesSet s;
  s.times = traj.times;
  s.modes = watch;
  const BoxIndexer& box = system.box();
  for (const ModeIndex j : watch) {
    s.values.emplace_back();
    for (const auto& state : traj.states) s.values.back().push_back(state[box.index(j)]);
  }
  out.write("series.csv", series_csv(s, "s"));

  std::ostringstream cons;
  cons << "s,mass,h0,z\n";
  const ConservedQuantities q0 = system.conserved(traj.states.front());
  double dm = 0.0, dh = 0.0, dz = 0.0;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const ConservedQuantities q = system.conserved(traj.states[k]);
    cons << num(traj.times[k]) << ',' << num(q.mass) << ',' << num(q.h0) << ',' << num(q.z) << '\n';
    dm = std::max(dm, relative_change(q.mass, q0.mass));
    dh = std::max(dh, relative_change(q.h0, q0.h0));
    dz = std::max(dz, relative_change(q.z, q0.z));
  }
  out.write("conservation.csv", cons.str());
  r.diagnostics["mass_drift"] = dm;
  r.diagnostics["h0_drift"] = dh;
  r.diagnostics["z_drift"] = dz;
  r.diagnostics["snapshots"] = traj.times.size();
  r.flags["conservation"] = std::max({dm, dh, dz}) <= c.resonant.conservation_tolerance;
  return r;
}

struct NlsRun {
  EvolveResult result;
  double scale = 1.0;  // multiply by this to get rescaled-form amplitudes
};

NlsRun nls_run(const ExperimentConfig& c, const std::vector<ModeIndex>& watch, const SnapshotObserver& observer) {
  const double delta = c.nls.delta;
  AmplitudeField datum = initial_datum(c);
  NlsParams p;
  p.lambda = c.nls.lambda;
  p.tau = c.nls.tau;
  p.t_final = c.nls.t_final;
  p.k = c.nls.k;
  p.record_stride = c.nls.record_stride;
  p.splitting = c.nls.splitting;
  p.dealias = c.nls.dealias;
  NlsRun run;
  if (c.nls.form == NlsForm::delta) {
    AmplitudeField scaled;
    for (const auto& [j, v] : datum.amplitudes()) scaled.set(j, v * delta);
    datum = std::move(scaled);
    p.coupling = 1.0;
    run.scale = 1.0 / delta;
  } else {
    p.coupling = delta * delta;
  }
  run.result = evolve(to_spectrum(p.k, datum), p, watch, observer);
  return run;
}

void nls_diagnostics(const ExperimentConfig& c, const EvolveResult& e, Outcome& r) {
  r.diagnostics["mass_drift"] = e.max_relative_mass_drift;
  r.diagnostics["alias_fraction"] = e.max_alias_fraction;
  r.diagnostics["steps"] = e.steps;
  r.flags["mass_conservation"] = e.max_relative_mass_drift <= c.nls.mass_tolerance;
}

std::string mass_csv(const EvolveResult& e) {
  std::ostringstream os;
  os << "t,mass\n";
  for (std::size_t k = 0; k < e.mass.size(); ++k) os << num(e.series.times[k]) << ',' << num(e.mass[k]) << '\n';
  return os.str();
}

Outcome run_evolve_nls(const ExperimentConfig& c, OutputDir& out) {
  Outcome r;
  const NlsRun run = nls_run(c, watch_modes(c), {});
  out.write("series.csv", series_csv(run.result.series, "t"));
  out.write("mass.csv", mass_csv(run.result));
  nls_diagnostics(c, run.result, r);
  return r;
}

Outcome run_compare(const ExperimentConfig& c, OutputDir& out) {
  Outcome r;
  ConvergenceSettings s;
  s.slow_horizon = c.compare.slow_horizon;
  s.lambda = c.nls.lambda;
  s.k = c.compare.k;
  s.tau = c.nls.tau;
  s.splitting = c.nls.splitting;
  s.records = c.compare.records;
  s.resonant_radius = c.resonant.radius;
  s.resonant_dt = c.resonant.dt;
  s.leak_tolerance = c.resonant.leak_tolerance;
  const ConvergenceStudy study = convergence_study(c.compare.epsilons, initial_datum(c), s);

  std::ostringstream csv;
  csv << "epsilon,t,wiener_error\n";
  json reports = json::array();
  for (const auto& e : study.reports) {
    for (std::size_t k = 0; k < e.times.size(); ++k)
      csv << num(e.epsilon) << ',' << num(e.times[k]) << ',' << num(e.wiener_errors[k]) << '\n';
    reports.push_back({{"epsilon", e.epsilon}, {"sup_error", e.sup_error}, {"fitted_C", e.fitted_constant()}});
  }
  bool ratios_ok = true;
  for (const double q : study.error_ratios) ratios_ok = ratios_ok && q >= c.compare.ratio_min && q <= c.compare.ratio_max;
  const bool order_ok = study.observed_order >= c.compare.order_min && study.observed_order <= c.compare.order_max;

  json doc;
  doc["datum"] = to_string(c.datum.kind);
  doc["slow_horizon"] = c.compare.slow_horizon;
  doc["reports"] = std::move(reports);
  doc["observed_order"] = study.observed_order;
  doc["error_ratios"] = study.error_ratios;
  out.write("compare.json", doc.dump(2) + "\n");
  out.write("compare_errors.csv", csv.str());
  r.diagnostics["observed_order"] = study.observed_order;
  r.flags["order_in_range"] = order_ok;
  r.flags["ratios_in_range"] = ratios_ok;
  return r;
}

CascadeSettings cascade_settings(const ExperimentConfig& c) {
  CascadeSettings s;
  s.epsilon = c.cascade.epsilon;
  s.lambda = c.nls.lambda;
  s.gamma = c.cascade.gamma;
  s.theta = c.cascade.theta;
  s.alpha = c.cascade.alpha;
  s.max_generation = c.cascade.max_generation;
  s.fit_checks = c.cascade.checks;
  return s;
}

// Fine steps over the fit window, then the configured step to the horizon.
Trajectory cascade_trajectory(const ExperimentConfig& c, const ResonantSystem& system) {
  const CascadeSettings defaults;
  const double fine_end = std::min(2.0 * defaults.fit_window_hi, c.cascade.slow_horizon);
  IntegrateOptions opts;
  opts.t_final = fine_end;
  opts.dt = std::min(c.cascade.fit_dt, c.resonant.dt);
  opts.leak_tolerance = c.resonant.leak_tolerance;
  Trajectory traj = integrate(system, initial_datum(c, c.resonant.radius), opts);
  if (fine_end >= c.cascade.slow_horizon) return traj;

  opts.t_final = c.cascade.slow_horizon - fine_end;
  opts.dt = c.resonant.dt;
  opts.stride = c.resonant.stride;
  const Trajectory rest = integrate(system, traj.field(traj.times.size() - 1), opts);
  for (std::size_t k = 1; k < rest.times.size(); ++k) {
    traj.times.push_back(fine_end + rest.times[k]);
    traj.states.push_back(rest.states[k]);
  }
  return traj;
}

Outcome run_cascade_report(const ExperimentConfig& c, OutputDir& out) {
  Outcome r;
  const ResonantSystem system(c.resonant.radius, c.nls.lambda);
  const Trajectory traj = cascade_trajectory(c, system);
  const auto watch = watch_modes(c);
  const ModeSeriesSet series = series_from_trajectory(traj, watch, c.cascade.epsilon);
  const CascadeReport report = build_cascade_report(series, cascade_settings(c));

  out.write("series.csv", series_csv(series, "t"));
  out.write("cascade_report.json", report.to_json() + "\n");
  out.write("cascade_report.txt", report.to_table());
  r.diagnostics["remainder_c0"] = report.constants.c0;
  r.diagnostics["remainder_c"] = report.constants.c;
  r.diagnostics["localization_bound"] = report.localization_bound;

  // Largest eps at which each generation ignites (one mode per class).
  std::vector<double> grid;
  for (int k = 2; k <= 16; ++k) grid.push_back(std::pow(10.0, -0.5 * k));
  json scan = json::array();
  for (const ModeIndex j : watch) {
    if (extremal_generation(j) < 1 || j.j1 < 0 || j.j2 < 0) continue;
    const IgnitionScan sc = ignition_scan(traj, j, c.cascade.gamma, grid);
    scan.push_back({{"mode", mode_json(j)},
                    {"epsilons", sc.epsilons},
                    {"margins", sc.margins},
                    {"largest_passing_epsilon", sc.largest_passing ? json(*sc.largest_passing) : json(nullptr)}});
  }
  r.diagnostics["ignition_scan"] = std::move(scan);
  if (c.cascade.checks) r.flags["cascade"] = report.pass();
  return r;
}

Outcome run_figure(const ExperimentConfig& c, OutputDir& out, bool closed_square) {
  Outcome r;
  const auto watch = watch_modes(c);
  const double eps = c.epsilon();
  // Largest |u_j| with |j| != 1, in original-form units (datum delta*u0).
  double outside = 0.0;
  const double scale = c.nls.form == NlsForm::delta ? 1.0 : c.nls.delta;
  SnapshotObserver observer;
  if (closed_square)
    observer = [&](double, const Spectrum& s) {
      const auto v = s.values();
      for (std::size_t i = 0; i < v.size(); ++i)
        if (norm_sq(s.mode(i)) != 1) outside = std::max(outside, std::abs(v[i]) * scale);
    };
  const NlsRun run = nls_run(c, watch, observer);
  const auto& series = run.result.series;

  std::ostringstream csv;
  csv << 't';
  for (const ModeIndex j : watch) csv << ",log10abs_" << j.j1 << '_' << j.j2;
  csv << '\n';
  for (std::size_t k = 0; k < series.times.size(); ++k) {
    csv << num(series.times[k]);
    for (std::size_t i = 0; i < watch.size(); ++i) {
      const double a = std::abs(series.values[i][k]);
      csv << ',' << num(a > 0.0 ? std::log10(a) : -std::numeric_limits<double>::infinity());
    }
    csv << '\n';
  }
  out.write(closed_square ? "figure2.csv" : "figure1.csv", csv.str());
  out.write("mass.csv", mass_csv(run.result));
  nls_diagnostics(c, run.result, r);

  // First crossing of eps^gamma / 4 (rescaled form) for each recorded mode.
  const double threshold = std::pow(eps, c.cascade.gamma) / 4.0 / run.scale;
  json ignition = json::array();
  for (const ModeIndex j : watch) {
    const auto t = ignition_time(series, j, threshold);
    ignition.push_back({{"mode", mode_json(j)}, {"time", t ? json(*t) : json(nullptr)}});
  }
  r.diagnostics["epsilon"] = eps;
  r.diagnostics["ignition_threshold"] = threshold;
  r.diagnostics["ignition"] = std::move(ignition);
  if (closed_square) {
    r.diagnostics["max_outside_unit_circle"] = outside;
    r.flags["no_cascade"] = outside < 10.0 * eps * eps;
  }
  return r;
}

}  // namespace

ValidationError::ValidationError(std::vector<Diagnostic> diagnostics)
    : Error(join_diagnostics(diagnostics)), diagnostics_(std::move(diagnostics)) {}

bool RunResult::pass() const {
  for (const auto& [name, ok] : pass_flags)
    if (!ok) return false;
  return true;
}

int RunResult::exit_status() const { return pass() ? 0 : 1; }

const char* code_version() { return CASCADE_VERSION; }

RunResult run(const ExperimentConfig& config, const RunOptions& options) {
  ExperimentConfig c = options.desk_scale ? desk_scale(config) : config;
  if (c.run.mode == RunMode::figure1) c.datum.kind = DatumKind::five_mode;
  if (c.run.mode == RunMode::figure2) c.datum.kind = DatumKind::square;
  if (auto d = validate(c); !d.empty()) throw ValidationError(std::move(d));

  OutputDir out(options.out_dir.empty() ? fs::path(c.run.out_dir) : fs::path(options.out_dir));
  const std::string config_text = serialize_config(c);
  out.write("config.ini", config_text);
  log_line(options, "mode " + to_string(c.run.mode) + " -> " + out.root().string());

  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  switch (c.run.mode) {
    case RunMode::resonances: o = run_resonances(c, out); break;
    case RunMode::evolve_resonant: o = run_evolve_resonant(c, out); break;
    case RunMode::evolve_nls: o = run_evolve_nls(c, out); break;
    case RunMode::compare: o = run_compare(c, out); break;
    case RunMode::cascade_report: o = run_cascade_report(c, out); break;
    case RunMode::figure1: o = run_figure(c, out, false); break;
    case RunMode::figure2: o = run_figure(c, out, true); break;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  RunResult result;
  result.out_dir = out.root().string();
  result.pass_flags = o.flags;
  result.artifacts = out.records();

  json m;
  m["mode"] = to_string(c.run.mode);
  m["code_version"] = code_version();
  m["config_sha256"] = sha256_hex(config_text);
  m["desk_scale"] = options.desk_scale;
  m["deterministic"] = c.run.deterministic;
  if (!c.run.deterministic) {
    m["wall_time_seconds"] = wall;
    m["threads"] = omp_get_max_threads();
  }
  m["diagnostics"] = std::move(o.diagnostics);
  m["pass_flags"] = o.flags;
  m["pass"] = result.pass();
  json files = json::array();
  for (const auto& a : result.artifacts) files.push_back({{"path", a.path}, {"sha256", a.sha256}, {"bytes", a.bytes}});
  m["artifacts"] = std::move(files);
  const std::string manifest = m.dump(2) + "\n";
  std::ofstream(out.root() / "manifest.json", std::ios::binary | std::ios::trunc) << manifest;

  for (const auto& [name, ok] : result.pass_flags) log_line(options, (ok ? "PASS " : "FAIL ") + name);
  return result;
}

}  // namespace cascade
