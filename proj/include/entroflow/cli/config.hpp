#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "entroflow/sampling.hpp"
#include "entroflow/serialize.hpp"

namespace entroflow::cli {

enum class Spacing { linear, log };

struct TimeGrid {
  double t_max = 5.0;
  int steps = 51;
  Spacing spacing = Spacing::linear;
  std::vector<double> points() const;
};

/// Config file (all fields optional):
/// {"seed": n, "workers": n,
///  "tolerances": {"name": value, ..},
///  "sampler": {"count": n, "blend_epsilons": [..], "near_pure_fraction": x},
///  "t_grid": {"t_max": x, "steps": n, "spacing": "linear"|"log"},
///  "mlsi": {"nm_budget": n, "nm_restarts": n},
///  "cp_times": [..]}
struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::map<std::string, double> tolerances;  // overrides only; see tolerance()
  SamplerConfig sampler;
  TimeGrid t_grid;
  int workers = 1;
  int nm_budget = 500;
  int nm_restarts = 8;
  std::vector<double> cp_times{0.1, 0.5, 1.0, 2.0};

  /// Throws InputError unless count >= 1, t_max > 0, steps >= 2 and all tolerances > 0.
  void validate() const;
  /// Override if present, otherwise the built-in default. Throws on unknown names.
  double tolerance(const std::string& name) const;
  /// Echo for reports. The worker count is omitted: it never changes results.
  Json to_json() const;
};

/// Built-in tolerance table.
const std::map<std::string, double>& default_tolerances();

ExperimentConfig config_from_json(const Json& j);
ExperimentConfig load_config(const std::optional<std::string>& path);
/// ENTROFLOW_WORKERS, when set, replaces cfg.workers. Invalid values throw InputError.
void apply_worker_env(ExperimentConfig& cfg);

}  // namespace entroflow::cli
