#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pathrep_cli/acceptance.hpp"
#include "pathrep_cli/config.hpp"
#include "pathrep_cli/experiments.hpp"

namespace {

using namespace pathrep::cli;

enum Exit { kPass = 0, kFail = 1, kConfig = 2 };

struct Options {
  std::string config;
  std::string output_dir;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> tolerances;
  bool quiet = false;
};

void add_common(CLI::App* sub, Options& o, bool config_required) {
  auto* c = sub->add_option("-c,--config", o.config, "Experiment config (JSON, comments allowed)");
  if (config_required) c->required();
  c->check(CLI::ExistingFile);
  sub->add_option("-o,--output-dir", o.output_dir,
                  "Output directory (overrides PATHREP_OUTPUT_DIR and the config)");
  sub->add_option("-s,--seed", o.seed, "RNG seed (overrides the config)");
  sub->add_option("-t,--tol", o.tolerances, "Threshold override name=value (repeatable)");
  sub->add_flag("-q,--quiet", o.quiet, "Print only the result line");
}

std::filesystem::path output_dir(const Options& o, const ExperimentConfig& cfg) {
  if (!o.output_dir.empty()) return o.output_dir;
  if (const char* env = std::getenv("PATHREP_OUTPUT_DIR"); env && *env) return env;
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  return "out";
}

int run(const std::string& kind, const Options& o) {
  ExperimentConfig cfg;
  std::filesystem::path base_dir;
  if (!o.config.empty()) {
    cfg = parse_config_file(o.config, kind == "run" ? std::string{} : kind);
    base_dir = std::filesystem::path(o.config).parent_path();
  } else {
    cfg.experiment = kind;
  }
  if (o.seed) cfg.seed = *o.seed;
  for (const auto& t : o.tolerances) {
    const auto [name, value] = parse_tolerance(t);
    cfg.tolerances[name] = value;
  }

  Report report = run_experiment(cfg, base_dir);
  const auto dir = output_dir(o, cfg);
  write_outputs(report, dir, cfg.stem());

  if (o.quiet) {
    std::cout << cfg.experiment << ": " << (report.pass() ? "PASS" : "FAIL") << '\n';
  } else if (cfg.experiment == "verify-all") {
    for (const auto& row : report.tables.front().rows) {
      const auto& name = std::get<std::string>(row[2]);
      const auto& pass = std::get<std::string>(row[5]);
      std::cout << "  [" << pass << "] " << name << " = " << format_double(std::get<double>(row[3]))
                << " (" << std::get<std::string>(row[4]) << ")\n";
    }
    std::cout << "result: " << (report.pass() ? "PASS" : "FAIL") << '\n';
  } else {
    std::cout << report.text();
  }
  std::cout << "outputs: " << dir.string() << '\n';
  return report.pass() ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parallel transport, reconstruction, descent and bordism experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "pathrep 0.1.0");

  Options options;
  std::string chosen;
  auto add = [&](const std::string& name, const std::string& help, bool config_required) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, options, config_required);
    sub->callback([&chosen, name] { chosen = name; });
  };
  add("run", "Run the experiment named in the config", true);
  add("transport", "Transport along a path; table of F(begin, u)", true);
  add("convergence", "Product-integral convergence orders", true);
  add("reconstruct", "Recover a connection from its transport oracle", true);
  add("holonomy", "Loop holonomies of a global bundle", true);
  add("bordism", "Evaluate a decorated bordism word", true);
  add("tabulate", "Write a transport oracle table", true);
  add("verify-all", "Run all acceptance criteria", false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfig;
  }

  try {
    return run(chosen, options);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const pathrep::Error& e) {
    std::cerr << "numerical failure (" << pathrep::to_string(e.code()) << "): " << e.what() << '\n';
    return kFail;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFail;
  }
}
