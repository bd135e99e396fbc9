#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "entroflow/cli/config.hpp"

namespace entroflow::cli {

/// Exit codes: 0 all checks pass, 1 a check failed, 2 parse/input error,
/// 3 domain or numerical error, 4 size cap exceeded.
enum ExitCode : int { kPass = 0, kCheckFailed = 1, kInputError = 2, kDomainError = 3, kSizeError = 4 };

/// Files produced by a command, in emission order (name relative to --out).
struct CommandOutput {
  bool pass = true;
  std::vector<std::pair<std::string, std::string>> files;
  std::string summary;  // one line for stdout
};

CommandOutput cmd_debruijn(const ExperimentConfig& cfg, const std::string& generator_file,
                           const std::optional<std::string>& state_file = std::nullopt);
CommandOutput cmd_mlsi(const ExperimentConfig& cfg, const std::string& generator_file);
/// weights: "uniform", "gibbs:<mu>", or a JSON file with a list of weights.
CommandOutput cmd_freegroup(const ExperimentConfig& cfg, const std::string& kind, int k, int radius,
                            const std::string& weights = "uniform");
CommandOutput cmd_intertwine(const ExperimentConfig& cfg, const std::string& input_file, double K = 1.0);
CommandOutput cmd_subalg(const ExperimentConfig& cfg, const std::string& spec_file);

/// Maps an in-flight exception to its exit code.
int exit_code_for(const std::exception& e);

/// Writes the files plus a timing.json sidecar into out_dir (created if needed).
void write_outputs(const std::string& out_dir, const CommandOutput& out, const std::string& command,
                   double wall_seconds, int workers);

}  // namespace entroflow::cli
