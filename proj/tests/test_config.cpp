#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cascade/hash.hpp"
#include "cascade/reference.hpp"
#include "cascade/runner.hpp"

using namespace cascade;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("cascade_test_" + name);
  fs::remove_all(d);
  return d;
}

bool has_key(const std::vector<Diagnostic>& d, const std::string& key) {
  return std::ranges::any_of(d, [&](const Diagnostic& x) { return x.key == key; });
}

}  // namespace

TEST_CASE("config: defaults round trip through INI") {
  const ExperimentConfig c;
  for (bool annotate : {false, true}) CHECK(parse_config(serialize_config(c, annotate)) == c);
  CHECK(serialize_config(c, true).find("; ") != std::string::npos);

  ExperimentConfig d;
  d.run.mode = RunMode::cascade_report;
  d.nls.delta = 0.0158;
  d.nls.splitting = Splitting::lie;
  d.compare.epsilons = {0.1, 0.03};
  d.cascade.watch = {{2, 2}, {-1, 0}};
  d.resonances.targets = {{0, 0}, {1, 2}};
  const std::string text = serialize_config(d);
  CHECK(text.find("0.0158\n") != std::string::npos);
  CHECK(parse_config(text) == d);
}

TEST_CASE("config: partial files keep defaults") {
  const ExperimentConfig c = parse_config("[nls]\ndelta = 0.1\n[run]\nmode = figure2\n");
  CHECK(c.nls.delta == 0.1);
  CHECK(c.run.mode == RunMode::figure2);
  CHECK(c.nls.k == 128);
  CHECK(c.epsilon() == doctest::Approx(0.01));
}

TEST_CASE("config: malformed input names the key") {
  auto message = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const Error& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("[nls]\nbogus = 1\n").find("nls.bogus") != std::string::npos);
  CHECK(message("[nope]\nk = 1\n").find("nope") != std::string::npos);
  CHECK(message("[nls]\nk = twelve\n").find("nls.k") != std::string::npos);
  CHECK(message("[nls]\ntau = 1e-3x\n").find("nls.tau") != std::string::npos);
  CHECK(message("[run]\nmode = movie\n").find("run.mode") != std::string::npos);
  CHECK_THROWS_AS(load_config("/nonexistent/cascade.ini"), Error);
}

TEST_CASE("config: mode lists") {
  const std::vector<ModeIndex> m{{0, 1}, {1, 1}, {-2, 0}};
  CHECK(parse_mode_list("0,1 1,1  -2,0") == m);
  CHECK(format_mode_list(m) == "0,1 1,1 -2,0");
  CHECK(parse_mode_list("").empty());
  CHECK_THROWS_AS(parse_mode_list("1;1"), Error);
  CHECK_THROWS_AS(parse_mode_list("1,"), Error);
}

TEST_CASE("validate: defaults are clean, bad values are reported by key") {
  CHECK(validate(ExperimentConfig{}).empty());
  for (RunMode m : {RunMode::resonances, RunMode::evolve_resonant, RunMode::evolve_nls, RunMode::compare,
                    RunMode::cascade_report, RunMode::figure2}) {
    ExperimentConfig c;
    c.run.mode = m;
    CAPTURE(to_string(m));
    CHECK(validate(c).empty());
  }

  ExperimentConfig c;
  c.cascade.theta = 0.3;
  const auto d = validate(c);
  REQUIRE(d.size() == 1);
  CHECK(d[0].key == "cascade.theta");

  c = {};
  c.run.mode = RunMode::cascade_report;
  c.resonant.radius = 4;
  c.cascade.watch = {{9, 9}};
  const auto w = validate(c);
  REQUIRE(w.size() == 1);
  CHECK(w[0].key == "cascade.watch");

  c = {};
  c.nls.k = 7;
  c.nls.tau = -1.0;
  c.compare.epsilons = {0.01, 0.02};
  const auto many = validate(c);
  CHECK(has_key(many, "nls.k"));
  CHECK(has_key(many, "nls.tau"));
  CHECK(has_key(many, "compare.epsilons"));
}

TEST_CASE("validate: time-step heuristic") {
  ExperimentConfig c;
  c.run.mode = RunMode::evolve_nls;
  c.nls.form = NlsForm::epsilon;
  c.nls.k = 16;
  c.nls.tau = 0.5;  // 0.5 * |(2,2)|^2 = 4 > pi
  CHECK(has_key(validate(c), "nls.tau"));
  c.nls.tau = 1e-3;
  CHECK(validate(c).empty());
}

TEST_CASE("desk scale only touches the figure modes") {
  ExperimentConfig c;
  const ExperimentConfig d = desk_scale(c);
  CHECK(d.epsilon() == doctest::Approx(0.02));
  CHECK(d.nls.k == 64);
  CHECK(d.nls.t_final == doctest::Approx(50.0));
  c.run.mode = RunMode::compare;
  CHECK(desk_scale(c) == c);
  CHECK(watch_modes(ExperimentConfig{}).size() == 16);
}

TEST_CASE("runner: resonances artifacts and manifest") {
  const fs::path dir = scratch_dir("resonances");
  ExperimentConfig c;
  c.run.mode = RunMode::resonances;
  c.resonances.targets = {{1, 1}, {0, 0}, {2, 1}};
  RunOptions o;
  o.out_dir = dir.string();
  const RunResult r = run(c, o);
  CHECK(r.pass());
  CHECK(r.exit_status() == 0);
  CHECK(r.pass_flags.at("oracle_match"));

  const auto doc = nlohmann::json::parse(slurp(dir / "resonances.json"));
  const ModeSet support = box(2);
  for (std::size_t i = 0; i < c.resonances.targets.size(); ++i) {
    const ModeIndex j = c.resonances.targets[i];
    CHECK(doc["targets"][i]["count"] == reference::brute_force_resonances(j, support).size());
  }

  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["mode"] == "resonances");
  CHECK(manifest["pass"] == true);
  CHECK_FALSE(manifest.contains("wall_time_seconds"));
  for (const auto& a : manifest["artifacts"]) {
    const std::string body = slurp(dir / a["path"].get<std::string>());
    CHECK(a["sha256"] == sha256_hex(body));
    CHECK(a["bytes"] == body.size());
  }
  // The --out override is not part of the recorded config, so the hashes do
  // not depend on where a run writes.
  CHECK(parse_config(slurp(dir / "config.ini")) == c);
  fs::remove_all(dir);
}

TEST_CASE("runner: deterministic runs are byte-identical") {
  ExperimentConfig c;
  c.run.mode = RunMode::evolve_resonant;
  c.resonant.radius = 4;
  c.resonant.t_final = 0.05;
  c.resonant.leak_tolerance = 1e-4;
  std::string first;
  for (int k = 0; k < 2; ++k) {
    const fs::path dir = scratch_dir("determinism");
    RunOptions o;
    o.out_dir = dir.string();
    const RunResult r = run(c, o);
    CHECK(r.pass());
    std::string all;
    for (const auto& a : r.artifacts) all += a.path + a.sha256;
    all += slurp(dir / "manifest.json");
    if (k == 0) first = all;
    else CHECK(all == first);
    fs::remove_all(dir);
  }
}

TEST_CASE("runner: invalid config is refused before any output") {
  const fs::path dir = scratch_dir("invalid");
  ExperimentConfig c;
  c.cascade.theta = 0.5;
  RunOptions o;
  o.out_dir = dir.string();
  try {
    run(c, o);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.diagnostics().size() == 1);
  }
  CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("config: custom datum") {
  ExperimentConfig c;
  c.run.mode = RunMode::evolve_resonant;
  c.datum.kind = DatumKind::custom;
  c.datum.entries = {{{0, 0}, {1.0, 0.0}}, {{1, 2}, {0.25, -0.5}}};
  CHECK(parse_config(serialize_config(c)) == c);
  CHECK(format_datum_entries(c.datum.entries) == "0,0,1,0 1,2,0.25,-0.5");
  CHECK(validate(c).empty());
  const AmplitudeField a = initial_datum(c);
  CHECK(a.get({1, 2}) == cplx{0.25, -0.5});
  CHECK(a.size() == 2);

  c.datum.entries.push_back({{0, 0}, 2.0});
  c.datum.entries.push_back({{9, 0}, 1.0});
  const auto d = validate(c);
  CHECK(d.size() == 2);
  CHECK(std::ranges::all_of(d, [](const Diagnostic& x) { return x.key == "datum.entries"; }));

  c.datum.entries.clear();
  CHECK(has_key(validate(c), "datum.entries"));
  CHECK_THROWS_AS(parse_datum_entries("1,2,3"), Error);
  CHECK_THROWS_AS(parse_datum_entries("1,2,x,0"), Error);
}
