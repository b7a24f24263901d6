// cascade_cli <subcommand> --config <path> [--desk-scale] [--out <dir>]
//
// Exit status: 0 all pass flags hold, 1 some pass flag failed, 2 bad
// arguments or configuration, 3 the computation itself failed.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cascade/config.hpp"
#include "cascade/runner.hpp"

namespace {

constexpr int kInvalid = 2;
constexpr int kFailed = 3;

struct Args {
  std::string config;
  std::string out;
  bool desk_scale = false;
  bool quiet = false;
};

cascade::ExperimentConfig load(const Args& a) {
  return a.config.empty() ? cascade::ExperimentConfig{} : cascade::load_config(a.config);
}

int print_diagnostics(const std::vector<cascade::Diagnostic>& d) {
  for (const auto& x : d) std::cerr << x.key << ": " << x.message << "\n";
  return d.empty() ? 0 : kInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resonant cascade experiments for cubic NLS on the 2-torus"};
  app.require_subcommand(1);
  Args args;

  const char* modes[] = {"resonances", "evolve-resonant", "evolve-nls", "compare",
                         "cascade-report", "figure1", "figure2"};
  for (const char* m : modes) {
    auto* sub = app.add_subcommand(m, std::string("run mode ") + m);
    sub->add_option("--config", args.config, "INI file; defaults apply to missing keys")->check(CLI::ExistingFile);
    sub->add_option("--out", args.out, "output directory (overrides run.out_dir)");
    sub->add_flag("--desk-scale", args.desk_scale, "figure modes: eps = 0.02, K = 64, t <= 1/eps");
    sub->add_flag("-q,--quiet", args.quiet, "no progress output");
  }
  auto* check = app.add_subcommand("validate", "print configuration diagnostics");
  check->add_option("--config", args.config)->check(CLI::ExistingFile);
  check->add_flag("--desk-scale", args.desk_scale);
  auto* defaults = app.add_subcommand("default-config", "print the annotated default configuration");

  CLI11_PARSE(app, argc, argv);

  try {
    if (defaults->parsed()) {
      std::cout << cascade::serialize_config(cascade::ExperimentConfig{}, true);
      return 0;
    }
    cascade::ExperimentConfig config;
    try {
      config = load(args);
    } catch (const cascade::Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kInvalid;
    }
    if (check->parsed()) {
      const auto d = cascade::validate(args.desk_scale ? cascade::desk_scale(config) : config);
      if (d.empty()) std::cout << "ok\n";
      return print_diagnostics(d);
    }
    config.run.mode = cascade::parse_run_mode(app.get_subcommands().front()->get_name());
    cascade::RunOptions options;
    options.desk_scale = args.desk_scale;
    options.out_dir = args.out;
    if (!args.quiet) options.log = &std::cerr;
    return cascade::run(config, options).exit_status();
  } catch (const cascade::ValidationError& e) {
    return print_diagnostics(e.diagnostics());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
}
