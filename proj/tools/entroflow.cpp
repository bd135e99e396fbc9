#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "entroflow/cli/commands.hpp"
#include "entroflow/errors.hpp"
#include "entroflow/log.hpp"

using namespace entroflow;
using namespace entroflow::cli;

int main(int argc, char** argv) {
  CLI::App app{"Entropy decay toolkit for finite-dimensional quantum Markov semigroups", "entroflow"};
  app.set_version_flag("--version", ENTROFLOW_VERSION);
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  bool quiet = false;
  app.add_option("--config", config_path, "Experiment config JSON");
  app.add_option("--seed", seed, "Random seed (overrides the config)");
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_flag("-q,--quiet", quiet, "Suppress warnings");

  std::string generator_file, input_file, spec_file;
  std::optional<std::string> state_file;
  std::string kind = "free_group", weights = "uniform";
  int k = 2, radius = 2;
  double K = 1.0;

  auto* deb = app.add_subcommand("debruijn", "deBruijn identity sweep");
  deb->add_option("generator", generator_file, "Generator, calculus or ball spec JSON")->required();
  deb->add_option("--state", state_file, "Single initial state JSON");

  auto* mlsi = app.add_subcommand("mlsi", "MLSI constant estimate and decay certificate");
  mlsi->add_option("generator", generator_file, "Generator, calculus or ball spec JSON")->required();

  auto* fg = app.add_subcommand("freegroup", "Ball-truncated group semigroup suite");
  fg->add_option("--kind", kind, "free_group or free_coxeter")->capture_default_str();
  fg->add_option("-k,--generators", k, "Number of generators")->capture_default_str();
  fg->add_option("-R,--radius", radius, "Ball radius")->capture_default_str();
  fg->add_option("--weights", weights, "uniform, gibbs:<mu> or a JSON list file")->capture_default_str();

  auto* itw = app.add_subcommand("intertwine", "Intertwining and CP-dominance check");
  itw->add_option("input", input_file, "Calculus or ball spec JSON")->required();
  itw->add_option("-K", K, "Curvature constant")->capture_default_str();

  auto* sub = app.add_subcommand("subalg", "Conditional expectation and subalgebra entropy checks");
  sub->add_option("spec", spec_file, "Subalgebra spec or chain JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }
  if (quiet) set_log_level(LogLevel::silent);

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    ExperimentConfig cfg = load_config(config_path);
    if (seed) cfg.seed = *seed;
    apply_worker_env(cfg);
    cfg.validate();

    const auto start = std::chrono::steady_clock::now();
    CommandOutput out;
    if (command == "debruijn") out = cmd_debruijn(cfg, generator_file, state_file);
    else if (command == "mlsi") out = cmd_mlsi(cfg, generator_file);
    else if (command == "freegroup") out = cmd_freegroup(cfg, kind, k, radius, weights);
    else if (command == "intertwine") out = cmd_intertwine(cfg, input_file, K);
    else out = cmd_subalg(cfg, spec_file);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    write_outputs(out_dir, out, command, wall, cfg.workers);
    std::cout << out.summary << '\n';
    return out.pass ? kPass : kCheckFailed;
  } catch (const Error& e) {
    std::cerr << "entroflow " << command << ": " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "entroflow " << command << ": internal error: " << e.what() << '\n';
    return kDomainError;
  }
}
