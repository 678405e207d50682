// Command-line front end.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "nlcl/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Pseudospectral experiments for a nonlocal dissipative conservation law"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::vector<std::string> sets;
  std::vector<std::string> sweeps;
  bool print_config = false;

  app.add_option("--config", config_path, "Config file ([grid]/[model]/[solver]/[experiment] key = value)")
      ->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory (default out/<command>)");
  app.add_option("--seed", seed, "Random seed");
  app.add_option("--threads", threads, "Worker threads for parallel sweeps")->check(CLI::PositiveNumber);
  app.add_option("--set", sets, "Override: section.key=value (repeatable)");
  app.add_option("--sweep", sweeps, "Sweep: key=a..b (doubling) or key=v1,v2,...; t maps to experiment.t");
  app.add_flag("--print-config", print_config, "Print the effective config and exit");

  const char* names[] = {"greens", "solve", "picard", "decay", "verify-lemmas"};
  const char* help[] = {"Green's function norm laws and envelopes",
                        "Integrate the equation and record norms",
                        "Picard iteration versus the time stepper",
                        "Decay-rate experiment with fitted exponents",
                        "Random-field checks of the functional inequalities"};
  for (int i = 0; i < 5; ++i) app.add_subcommand(names[i], help[i])->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : nlcl::exit_error;
  }

  const std::string cmd_name = app.get_subcommands().front()->get_name();
  nlcl::RunConfig cfg;
  try {
    cfg.command = *nlcl::parse_command(cmd_name);
    if (!config_path.empty()) nlcl::parse_config_file(cfg, config_path);
    for (const auto& s : sets) nlcl::apply_override(cfg, s);
    for (const auto& s : sweeps) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw nlcl::ConfigError("command line: --sweep expects key=range");
      std::string key = s.substr(0, eq);
      if (key.find('.') == std::string::npos) key = "experiment." + key;
      nlcl::apply_override(cfg, key + "=" + s.substr(eq + 1));
    }
    if (seed) cfg.seed = *seed;
    cfg.threads = threads;
    cfg.finalize();
  } catch (const std::exception& e) {
    std::cerr << "nlcl: " << e.what() << '\n';
    return nlcl::exit_error;
  }

  for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << '\n';
  if (print_config) {
    std::cout << nlcl::echo_config(cfg);
    return nlcl::exit_pass;
  }
  if (out_dir.empty()) out_dir = "out/" + cmd_name;
  const auto res = nlcl::dispatch(cfg, out_dir);
  std::cout << res.message << '\n';
  return res.exit_code;
}
