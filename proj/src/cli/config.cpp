#include "entroflow/cli/config.hpp"

#include <cmath>
#include <cstdlib>

#include "entroflow/entropyflow.hpp"
#include "entroflow/errors.hpp"

namespace entroflow::cli {

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> table{
      {"debruijn", 1e-5},   {"beta_margin", 0.05}, {"beta_consistency", 1e-6}, {"eigen", 1e-12},
      {"gns", 1e-10},       {"intertwining", 1e-10}, {"cp", 1e-9},           {"fm", 1e-8},
      {"mlsi", 1e-8},       {"subalg", 1e-9},      {"martingale", 1e-10},    {"expectation", 1e-10},
  };
  return table;
}

std::vector<double> TimeGrid::points() const {
  if (spacing == Spacing::linear) return linear_grid(t_max, steps);
  // Log grid with t = 0 prepended so trajectories start at the initial state.
  std::vector<double> g{0.0};
  const auto rest = log_grid(t_max * 1e-3, t_max, steps - 1);
  g.insert(g.end(), rest.begin(), rest.end());
  return g;
}

void ExperimentConfig::validate() const {
  if (sampler.count < 1) throw InputError("config: sampler.count must be >= 1");
  if (!(t_grid.t_max > 0) || !std::isfinite(t_grid.t_max)) throw InputError("config: t_grid.t_max must be > 0");
  if (t_grid.steps < 2) throw InputError("config: t_grid.steps must be >= 2");
  if (workers < 1) throw InputError("config: workers must be >= 1");
  if (nm_budget < 0 || nm_restarts < 0) throw InputError("config: mlsi budget and restarts must be >= 0");
  for (double e : sampler.blend_epsilons)
    if (!(e > 0 && e <= 1)) throw InputError("config: blend epsilons must lie in (0, 1]");
  if (sampler.blend_epsilons.empty()) throw InputError("config: blend_epsilons must not be empty");
  if (!(sampler.near_pure_fraction >= 0 && sampler.near_pure_fraction <= 1))
    throw InputError("config: near_pure_fraction must lie in [0, 1]");
  for (double t : cp_times)
    if (!(t > 0)) throw InputError("config: cp_times must be positive");
  for (const auto& [name, v] : tolerances) {
    if (!default_tolerances().count(name)) throw InputError("config: unknown tolerance \"" + name + "\"");
    if (!(v > 0) || !std::isfinite(v)) throw InputError("config: tolerance \"" + name + "\" must be > 0");
  }
}

double ExperimentConfig::tolerance(const std::string& name) const {
  if (auto it = tolerances.find(name); it != tolerances.end()) return it->second;
  auto it = default_tolerances().find(name);
  if (it == default_tolerances().end()) throw InputError("unknown tolerance \"" + name + "\"");
  return it->second;
}

Json ExperimentConfig::to_json() const {
  Json j = Json::object();
  j["seed"] = seed;
  Json tol = Json::object();
  for (const auto& [name, v] : default_tolerances()) tol[name] = tolerance(name);
  j["tolerances"] = std::move(tol);
  j["sampler"] = {{"count", sampler.count},
                  {"blend_epsilons", sampler.blend_epsilons},
                  {"near_pure_fraction", sampler.near_pure_fraction}};
  j["t_grid"] = {{"t_max", t_grid.t_max},
                 {"steps", t_grid.steps},
                 {"spacing", t_grid.spacing == Spacing::linear ? "linear" : "log"}};
  j["mlsi"] = {{"nm_budget", nm_budget}, {"nm_restarts", nm_restarts}};
  j["cp_times"] = cp_times;
  return j;
}

namespace {

template <typename T>
T get_as(const Json& j, const char* what) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InputError(std::string("config: bad value for ") + what);
  }
}

int get_int(const Json& j, const char* what) {
  if (!j.is_number_integer()) throw InputError(std::string("config: ") + what + " must be an integer");
  return get_as<int>(j, what);
}

double get_real(const Json& j, const char* what) {
  if (!j.is_number()) throw InputError(std::string("config: ") + what + " must be a number");
  return j.get<double>();
}

void reject_unknown(const Json& j, std::initializer_list<const char*> known, const char* where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) throw InputError(std::string("config: unknown field \"") + it.key() + "\" in " + where);
  }
}

}  // namespace

ExperimentConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("config: expected a JSON object");
  reject_unknown(j, {"seed", "workers", "tolerances", "sampler", "t_grid", "mlsi", "cp_times"}, "config");
  ExperimentConfig c;
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) throw InputError("config: seed must be an integer");
    c.seed = get_as<std::uint64_t>(j["seed"], "seed");
  }
  if (j.contains("workers")) c.workers = get_int(j["workers"], "workers");
  if (j.contains("tolerances")) {
    if (!j["tolerances"].is_object()) throw InputError("config: tolerances must be an object");
    for (auto it = j["tolerances"].begin(); it != j["tolerances"].end(); ++it)
      c.tolerances[it.key()] = get_real(it.value(), "tolerance");
  }
  if (j.contains("sampler")) {
    const Json& s = j["sampler"];
    if (!s.is_object()) throw InputError("config: sampler must be an object");
    reject_unknown(s, {"count", "blend_epsilons", "near_pure_fraction"}, "sampler");
    if (s.contains("count")) c.sampler.count = get_int(s["count"], "sampler.count");
    if (s.contains("blend_epsilons")) {
      if (!s["blend_epsilons"].is_array()) throw InputError("config: blend_epsilons must be an array");
      c.sampler.blend_epsilons.clear();
      for (const Json& e : s["blend_epsilons"]) c.sampler.blend_epsilons.push_back(get_real(e, "blend_epsilons"));
    }
    if (s.contains("near_pure_fraction")) c.sampler.near_pure_fraction = get_real(s["near_pure_fraction"], "near_pure_fraction");
  }
  if (j.contains("t_grid")) {
    const Json& g = j["t_grid"];
    if (!g.is_object()) throw InputError("config: t_grid must be an object");
    reject_unknown(g, {"t_max", "steps", "spacing"}, "t_grid");
    if (g.contains("t_max")) c.t_grid.t_max = get_real(g["t_max"], "t_grid.t_max");
    if (g.contains("steps")) c.t_grid.steps = get_int(g["steps"], "t_grid.steps");
    if (g.contains("spacing")) {
      const std::string sp = get_as<std::string>(g["spacing"], "t_grid.spacing");
      if (sp == "linear") c.t_grid.spacing = Spacing::linear;
      else if (sp == "log") c.t_grid.spacing = Spacing::log;
      else throw InputError("config: t_grid.spacing must be linear or log");
    }
  }
  if (j.contains("mlsi")) {
    const Json& m = j["mlsi"];
    if (!m.is_object()) throw InputError("config: mlsi must be an object");
    reject_unknown(m, {"nm_budget", "nm_restarts"}, "mlsi");
    if (m.contains("nm_budget")) c.nm_budget = get_int(m["nm_budget"], "mlsi.nm_budget");
    if (m.contains("nm_restarts")) c.nm_restarts = get_int(m["nm_restarts"], "mlsi.nm_restarts");
  }
  if (j.contains("cp_times")) {
    if (!j["cp_times"].is_array() || j["cp_times"].empty()) throw InputError("config: cp_times must be a non-empty array");
    c.cp_times.clear();
    for (const Json& t : j["cp_times"]) c.cp_times.push_back(get_real(t, "cp_times"));
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::optional<std::string>& path) {
  if (!path) return ExperimentConfig{};
  return config_from_json(read_json_file(*path));
}

void apply_worker_env(ExperimentConfig& cfg) {
  const char* env = std::getenv("ENTROFLOW_WORKERS");
  if (!env || !*env) return;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1 || v > 1024) throw InputError("ENTROFLOW_WORKERS must be an integer in [1, 1024]");
  cfg.workers = static_cast<int>(v);
}

}  // namespace entroflow::cli
