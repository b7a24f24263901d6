#include "cascade/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "cascade/amplitude_field.hpp"
#include "cascade/cascade_analysis.hpp"

namespace cascade {

namespace {

template <class E>
struct Names {
  std::vector<std::pair<E, const char*>> table;

  std::string name(E v) const {
    for (const auto& [e, s] : table)
      if (e == v) return s;
    throw Error("unnamed enum value");
  }
  E parse(const std::string& s, const char* what) const {
    std::string options;
    for (const auto& [e, n] : table) {
      if (s == n) return e;
      options += options.empty() ? n : std::string("|") + n;
    }
    throw Error("unknown " + std::string(what) + " '" + s + "' (expected " + options + ")");
  }
};

const Names<RunMode> kModes{{{RunMode::resonances, "resonances"},
                             {RunMode::evolve_resonant, "evolve-resonant"},
                             {RunMode::evolve_nls, "evolve-nls"},
                             {RunMode::compare, "compare"},
                             {RunMode::cascade_report, "cascade-report"},
                             {RunMode::figure1, "figure1"},
                             {RunMode::figure2, "figure2"}}};
const Names<DatumKind> kDatums{
    {{DatumKind::five_mode, "five_mode"}, {DatumKind::square, "square"}, {DatumKind::custom, "custom"}}};
const Names<NlsForm> kForms{{{NlsForm::delta, "delta"}, {NlsForm::epsilon, "epsilon"}}};

std::string format_double(double x) {
  char buf[32];
  return std::string(buf, std::to_chars(buf, buf + sizeof buf, x).ptr);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

double parse_double(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || s.empty() || !std::isfinite(v))
    throw Error(key + ": expected a finite number, got '" + raw + "'");
  return v;
}

int parse_int(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || s.empty())
    throw Error(key + ": expected an integer, got '" + raw + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "true") return true;
  if (s == "false") return false;
  throw Error(key + ": expected true|false, got '" + raw + "'");
}

std::vector<double> parse_double_list(const std::string& key, const std::string& raw) {
  std::istringstream is(raw);
  std::vector<double> out;
  for (std::string tok; is >> tok;) out.push_back(parse_double(key, tok));
  return out;
}

std::string format_double_list(const std::vector<double>& v) {
  std::string out;
  for (const double x : v) out += (out.empty() ? "" : " ") + format_double(x);
  return out;
}

// One schema row: how to read and write a key, plus its provenance note.
struct Key {
  const char* section;
  const char* name;
  const char* note;
  std::function<void(ExperimentConfig&, const std::string&, const std::string&)> read;
  std::function<std::string(const ExperimentConfig&)> write;
};

constexpr const char* kPublished = "published value";
constexpr const char* kChosen = "suite choice (no published value)";

#define CASCADE_KEY_D(sec, field, note)                                                                   \
  Key {                                                                                                   \
    #sec, #field, note, [](ExperimentConfig& c, const std::string& k, const std::string& v) {             \
      c.sec.field = parse_double(k, v);                                                                   \
    },                                                                                                    \
        [](const ExperimentConfig& c) { return format_double(c.sec.field); }                              \
  }
#define CASCADE_KEY_I(sec, field, note)                                                                   \
  Key {                                                                                                   \
    #sec, #field, note, [](ExperimentConfig& c, const std::string& k, const std::string& v) {             \
      c.sec.field = parse_int(k, v);                                                                      \
    },                                                                                                    \
        [](const ExperimentConfig& c) { return std::to_string(c.sec.field); }                             \
  }
#define CASCADE_KEY_B(sec, field, note)                                                                   \
  Key {                                                                                                   \
    #sec, #field, note, [](ExperimentConfig& c, const std::string& k, const std::string& v) {             \
      c.sec.field = parse_bool(k, v);                                                                     \
    },                                                                                                    \
        [](const ExperimentConfig& c) { return std::string(c.sec.field ? "true" : "false"); }            \
  }

const std::vector<Key>& schema() {
  static const std::vector<Key> keys = {
      {"run", "mode", "one of resonances|evolve-resonant|evolve-nls|compare|cascade-report|figure1|figure2",
       [](ExperimentConfig& c, const std::string&, const std::string& v) { c.run.mode = parse_run_mode(trim(v)); },
       [](const ExperimentConfig& c) { return to_string(c.run.mode); }},
      {"run", "out_dir", "artifact directory (overridden by --out)",
       [](ExperimentConfig& c, const std::string&, const std::string& v) { c.run.out_dir = trim(v); },
       [](const ExperimentConfig& c) { return c.run.out_dir; }},
      CASCADE_KEY_B(run, deterministic, "omit wall time and thread count from the manifest"),

      {"datum", "kind", "five_mode = 1 + 2cos x1 + 2cos x2, square = 2cos x1 + 2cos x2; published data",
       [](ExperimentConfig& c, const std::string&, const std::string& v) {
         c.datum.kind = parse_datum_kind(trim(v));
       },
       [](const ExperimentConfig& c) { return to_string(c.datum.kind); }},
      {"datum", "entries", "custom datum as space-separated j1,j2,re,im; suite extension",
       [](ExperimentConfig& c, const std::string&, const std::string& v) { c.datum.entries = parse_datum_entries(v); },
       [](const ExperimentConfig& c) { return format_datum_entries(c.datum.entries); }},

      {"nls", "form", "delta = coupling 1 on delta*u0, epsilon = coupling delta^2 on u0; suite choice",
       [](ExperimentConfig& c, const std::string&, const std::string& v) { c.nls.form = parse_nls_form(trim(v)); },
       [](const ExperimentConfig& c) { return to_string(c.nls.form); }},
      CASCADE_KEY_D(nls, delta, kPublished),
      CASCADE_KEY_I(nls, lambda, "published value (+1 defocusing, -1 focusing)"),
      CASCADE_KEY_D(nls, tau, kPublished),
      CASCADE_KEY_I(nls, k, "published value (grid points per side)"),
      CASCADE_KEY_D(nls, t_final, "fast time; suite choice (1/eps at the published delta)"),
      CASCADE_KEY_I(nls, record_stride, kChosen),
      {"nls", "splitting", "strang|lie; suite choice",
       [](ExperimentConfig& c, const std::string&, const std::string& v) {
         c.nls.splitting = parse_splitting(trim(v));
       },
       [](const ExperimentConfig& c) { return to_string(c.nls.splitting); }},
      {"nls", "dealias", "off|two_thirds; suite choice",
       [](ExperimentConfig& c, const std::string&, const std::string& v) { c.nls.dealias = parse_dealias(trim(v)); },
       [](const ExperimentConfig& c) { return to_string(c.nls.dealias); }},
      CASCADE_KEY_D(nls, mass_tolerance, "relative mass drift pass flag; suite choice"),

      CASCADE_KEY_I(resonant, radius, "truncation box max(|j1|,|j2|) <= R; suite choice"),
      CASCADE_KEY_D(resonant, dt, "RK4 step in slow time; suite choice"),
      CASCADE_KEY_D(resonant, t_final, "slow time; suite choice"),
      CASCADE_KEY_I(resonant, stride, kChosen),
      CASCADE_KEY_D(resonant, leak_tolerance, kChosen),
      CASCADE_KEY_D(resonant, conservation_tolerance, "relative drift pass flag; suite choice"),

      CASCADE_KEY_I(resonances, support_radius, kChosen),
      {"resonances", "targets", "space-separated j1,j2 pairs; suite choice",
       [](ExperimentConfig& c, const std::string&, const std::string& v) { c.resonances.targets = parse_mode_list(v); },
       [](const ExperimentConfig& c) { return format_mode_list(c.resonances.targets); }},
      CASCADE_KEY_B(resonances, oracle_check, "compare against brute-force enumeration"),

      {"compare", "epsilons", "decreasing list; suite choice",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.compare.epsilons = parse_double_list(k, v);
       },
       [](const ExperimentConfig& c) { return format_double_list(c.compare.epsilons); }},
      CASCADE_KEY_D(compare, slow_horizon, kChosen),
      CASCADE_KEY_I(compare, k, kChosen),
      CASCADE_KEY_I(compare, records, kChosen),
      CASCADE_KEY_D(compare, order_min, kChosen),
      CASCADE_KEY_D(compare, order_max, kChosen),
      CASCADE_KEY_D(compare, ratio_min, kChosen),
      CASCADE_KEY_D(compare, ratio_max, kChosen),

      CASCADE_KEY_D(cascade, epsilon, kChosen),
      CASCADE_KEY_D(cascade, gamma, "0 < gamma < 1; suite choice"),
      CASCADE_KEY_D(cascade, theta, "0 < theta < 1/4; suite choice"),
      CASCADE_KEY_D(cascade, alpha, kChosen),
      CASCADE_KEY_I(cascade, max_generation, kChosen),
      CASCADE_KEY_B(cascade, checks, "power-law and ignition pass flags"),
      CASCADE_KEY_D(cascade, slow_horizon, kChosen),
      CASCADE_KEY_D(cascade, fit_dt, "RK4 step over the power-law fit window; suite choice"),
      {"cascade", "watch", "space-separated j1,j2 pairs; empty = extremal modes up to max_generation",
       [](ExperimentConfig& c, const std::string&, const std::string& v) { c.cascade.watch = parse_mode_list(v); },
       [](const ExperimentConfig& c) { return format_mode_list(c.cascade.watch); }},
  };
  return keys;
}

#undef CASCADE_KEY_D
#undef CASCADE_KEY_I
#undef CASCADE_KEY_B

// Wiener norm of u0, an upper bound for sup |u0|.
double datum_sup(const ExperimentConfig& c) {
  switch (c.datum.kind) {
    case DatumKind::five_mode: return 5.0;
    case DatumKind::square: return 4.0;
    case DatumKind::custom: break;
  }
  double s = 0.0;
  for (const auto& e : c.datum.entries) s += std::abs(e.value);
  return s;
}

bool uses_resonant(RunMode m) {
  return m == RunMode::evolve_resonant || m == RunMode::compare || m == RunMode::cascade_report;
}

bool uses_nls(RunMode m) {
  return m == RunMode::evolve_nls || m == RunMode::compare || m == RunMode::figure1 || m == RunMode::figure2;
}

bool resolved(ModeIndex j, int k) {
  const int h = k / 2;
  return j.j1 >= -h && j.j1 < h && j.j2 >= -h && j.j2 < h;
}

}  // namespace

std::string to_string(RunMode m) { return kModes.name(m); }
RunMode parse_run_mode(const std::string& s) { return kModes.parse(s, "mode"); }
std::string to_string(DatumKind d) { return kDatums.name(d); }
DatumKind parse_datum_kind(const std::string& s) { return kDatums.parse(s, "datum"); }
std::string to_string(NlsForm f) { return kForms.name(f); }
NlsForm parse_nls_form(const std::string& s) { return kForms.parse(s, "form"); }

std::vector<ModeIndex> parse_mode_list(const std::string& s) {
  std::istringstream is(s);
  std::vector<ModeIndex> out;
  for (std::string tok; is >> tok;) {
    const auto comma = tok.find(',');
    if (comma == std::string::npos) throw Error("mode '" + tok + "' is not of the form j1,j2");
    int a = 0;
    int b = 0;
    const char* end = tok.data() + tok.size();
    const auto r1 = std::from_chars(tok.data(), tok.data() + comma, a);
    const auto r2 = std::from_chars(tok.data() + comma + 1, end, b);
    if (r1.ec != std::errc{} || r1.ptr != tok.data() + comma || r2.ec != std::errc{} || r2.ptr != end)
      throw Error("mode '" + tok + "' is not of the form j1,j2");
    out.push_back({a, b});
  }
  return out;
}

std::vector<DatumEntry> parse_datum_entries(const std::string& s) {
  std::istringstream is(s);
  std::vector<DatumEntry> out;
  for (std::string tok; is >> tok;) {
    std::vector<std::string> f;
    std::istringstream fs(tok);
    for (std::string part; std::getline(fs, part, ',');) f.push_back(part);
    if (f.size() != 4) throw Error("datum entry '" + tok + "' is not of the form j1,j2,re,im");
    const std::vector<ModeIndex> j = parse_mode_list(f[0] + "," + f[1]);
    out.push_back({j.front(), {parse_double("datum entry", f[2]), parse_double("datum entry", f[3])}});
  }
  return out;
}

std::string format_datum_entries(const std::vector<DatumEntry>& entries) {
  std::string out;
  for (const auto& e : entries)
    out += (out.empty() ? "" : " ") + std::to_string(e.mode.j1) + "," + std::to_string(e.mode.j2) + "," +
           format_double(e.value.real()) + "," + format_double(e.value.imag());
  return out;
}

AmplitudeField initial_datum(const ExperimentConfig& c, int truncation_radius) {
  switch (c.datum.kind) {
    case DatumKind::five_mode: return five_mode_datum(truncation_radius);
    case DatumKind::square: return nonresonant_square_datum(truncation_radius);
    case DatumKind::custom: break;
  }
  AmplitudeField a(truncation_radius);
  for (const auto& e : c.datum.entries) a.set(e.mode, e.value);
  return a;
}

std::string format_mode_list(const std::vector<ModeIndex>& modes) {
  std::string out;
  for (const ModeIndex j : modes)
    out += (out.empty() ? "" : " ") + std::to_string(j.j1) + "," + std::to_string(j.j2);
  return out;
}

ExperimentConfig parse_config(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream is(text);
  try {
    boost::property_tree::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error("config: " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  std::map<std::string, const Key*> by_name;
  for (const Key& k : schema()) by_name[std::string(k.section) + "." + k.name] = &k;

  ExperimentConfig c;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw Error("config: key '" + section + "' outside any section");
    for (const auto& [name, value] : body) {
      const std::string full = section + "." + name;
      const auto it = by_name.find(full);
      if (it == by_name.end()) throw Error("config: unknown key '" + full + "'");
      try {
        it->second->read(c, full, value.data());
      } catch (const Error& e) {
        const std::string what = e.what();
        throw Error(what.find(full) != std::string::npos ? what : "config: " + full + ": " + what);
      }
    }
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str());
}

std::string serialize_config(const ExperimentConfig& c, bool annotate) {
  std::ostringstream os;
  const char* section = nullptr;
  for (const Key& k : schema()) {
    if (!section || std::string(section) != k.section) {
      if (section) os << "\n";
      os << "[" << k.section << "]\n";
      section = k.section;
    }
    if (annotate) os << "; " << k.note << "\n";
    os << k.name << " = " << k.write(c) << "\n";
  }
  return os.str();
}

std::vector<ModeIndex> watch_modes(const ExperimentConfig& c) {
  switch (c.run.mode) {
    case RunMode::figure1:
    case RunMode::figure2: {
      std::vector<ModeIndex> out;
      for (int n = 0; n <= 15; ++n) out.push_back({0, n});
      return out;
    }
    case RunMode::evolve_resonant:
    case RunMode::evolve_nls:
    case RunMode::cascade_report:
      return c.cascade.watch.empty() ? extremal_watch_list(c.cascade.max_generation) : c.cascade.watch;
    default:
      return {};
  }
}

ExperimentConfig desk_scale(const ExperimentConfig& c) {
  ExperimentConfig out = c;
  if (c.run.mode == RunMode::figure1 || c.run.mode == RunMode::figure2) {
    out.nls.delta = std::sqrt(0.02);
    out.nls.k = 64;
    out.nls.t_final = 50.0;
  }
  return out;
}

std::vector<Diagnostic> validate(const ExperimentConfig& c) {
  std::vector<Diagnostic> out;
  auto fail = [&](std::string key, std::string msg) { out.push_back({std::move(key), std::move(msg)}); };

  if (c.run.out_dir.empty()) fail("run.out_dir", "must not be empty");

  if (!(c.nls.delta > 0.0)) fail("nls.delta", "must be positive");
  if (c.nls.lambda != 1 && c.nls.lambda != -1) fail("nls.lambda", "must be +1 or -1");
  if (!(c.nls.tau > 0.0)) fail("nls.tau", "must be positive");
  if (c.nls.k < 2 || c.nls.k % 2 != 0) fail("nls.k", "must be even and >= 2");
  if (!(c.nls.t_final >= 0.0)) fail("nls.t_final", "must be non-negative");
  if (c.nls.record_stride < 1) fail("nls.record_stride", "must be >= 1");
  if (!(c.nls.mass_tolerance > 0.0)) fail("nls.mass_tolerance", "must be positive");

  if (c.resonant.radius < 1) fail("resonant.radius", "must be >= 1");
  if (!(c.resonant.dt > 0.0)) fail("resonant.dt", "must be positive");
  if (!(c.resonant.t_final >= 0.0)) fail("resonant.t_final", "must be non-negative");
  if (c.resonant.stride < 1) fail("resonant.stride", "must be >= 1");
  if (!(c.resonant.leak_tolerance >= 0.0)) fail("resonant.leak_tolerance", "must be non-negative");
  if (!(c.resonant.conservation_tolerance > 0.0)) fail("resonant.conservation_tolerance", "must be positive");

  if (c.resonances.support_radius < 0) fail("resonances.support_radius", "must be >= 0");
  if (c.resonances.targets.empty()) fail("resonances.targets", "must name at least one mode");

  if (c.compare.epsilons.size() < 2) fail("compare.epsilons", "need at least two values");
  for (std::size_t i = 0; i < c.compare.epsilons.size(); ++i) {
    const double e = c.compare.epsilons[i];
    if (!(e > 0.0 && e < 1.0)) fail("compare.epsilons", "values must lie in (0, 1)");
    if (i > 0 && !(e < c.compare.epsilons[i - 1])) fail("compare.epsilons", "values must decrease");
  }
  if (!(c.compare.slow_horizon > 0.0)) fail("compare.slow_horizon", "must be positive");
  if (c.compare.k < 2 || c.compare.k % 2 != 0) fail("compare.k", "must be even and >= 2");
  if (c.compare.records < 1) fail("compare.records", "must be >= 1");
  if (!(c.compare.order_min <= c.compare.order_max)) fail("compare.order_min", "must not exceed order_max");
  if (!(c.compare.ratio_min <= c.compare.ratio_max)) fail("compare.ratio_min", "must not exceed ratio_max");

  if (!(c.cascade.epsilon > 0.0 && c.cascade.epsilon < 1.0)) fail("cascade.epsilon", "must lie in (0, 1)");
  if (!(c.cascade.gamma > 0.0 && c.cascade.gamma < 1.0)) fail("cascade.gamma", "must lie in (0, 1)");
  if (c.cascade.checks && !(c.cascade.theta > 0.0 && c.cascade.theta < 0.25))
    fail("cascade.theta", "the ignition theorem needs 0 < theta < 1/4");
  if (!(c.cascade.alpha > 0.0)) fail("cascade.alpha", "must be positive");
  if (c.cascade.max_generation < 0 || c.cascade.max_generation > 11)
    fail("cascade.max_generation", "must lie in [0, 11]");
  if (!(c.cascade.slow_horizon > 0.0)) fail("cascade.slow_horizon", "must be positive");
  if (!(c.cascade.fit_dt > 0.0)) fail("cascade.fit_dt", "must be positive");
  for (const ModeIndex j : c.cascade.watch)
    if (max_abs(j) > c.resonant.radius) {
      std::ostringstream msg;
      msg << "mode " << j << " lies outside the truncation box R = " << c.resonant.radius;
      fail("cascade.watch", msg.str());
    }

  if (c.datum.kind == DatumKind::custom) {
    std::set<ModeIndex> seen;
    if (c.datum.entries.empty()) fail("datum.entries", "a custom datum needs at least one entry");
    for (const auto& e : c.datum.entries) {
      std::ostringstream msg;
      if (!seen.insert(e.mode).second) {
        msg << "mode " << e.mode << " appears twice";
        fail("datum.entries", msg.str());
      } else if (uses_resonant(c.run.mode) && max_abs(e.mode) > c.resonant.radius) {
        msg << "mode " << e.mode << " lies outside the truncation box R = " << c.resonant.radius;
        fail("datum.entries", msg.str());
      }
    }
  }

  if (out.empty() && uses_nls(c.run.mode)) {
    const int k = c.run.mode == RunMode::compare ? c.compare.k : c.nls.k;
    const char* k_key = c.run.mode == RunMode::compare ? "compare.k" : "nls.k";
    std::int64_t omega = 2;
    for (const ModeIndex j : watch_modes(c)) {
      if (!resolved(j, k)) {
        std::ostringstream msg;
        msg << "watch mode " << j << " is not resolved on a " << k << " x " << k << " grid";
        fail(k_key, msg.str());
      }
      omega = std::max(omega, norm_sq(j));
    }
    if (c.datum.kind == DatumKind::custom)
      for (const auto& e : c.datum.entries)
        if (!resolved(e.mode, k)) {
          std::ostringstream msg;
          msg << "datum mode " << e.mode << " is not resolved on a " << k << " x " << k << " grid";
          fail(k_key, msg.str());
        }
    // Nonlinear rotation per step, and the linear phase of the fastest
    // recorded mode per step.
    const double eps = c.run.mode == RunMode::compare ? c.compare.epsilons.front() : c.epsilon();
    const double sup = datum_sup(c);
    const double rotation = c.nls.tau * eps * sup * sup;
    if (rotation >= 0.1) {
      std::ostringstream msg;
      msg << "step too large: tau * eps * sup|u0|^2 = " << rotation << " (must be < 0.1)";
      fail("nls.tau", msg.str());
    }
    if (c.nls.tau * double(omega) >= std::numbers::pi) {
      std::ostringstream msg;
      msg << "step too large: tau * |j|^2 = " << c.nls.tau * double(omega) << " for the fastest recorded mode"
          << " (must be < pi)";
      fail("nls.tau", msg.str());
    }
  }
  return out;
}

}  // namespace cascade
