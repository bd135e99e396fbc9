#include "entroflow/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>

#include "entroflow/calculus.hpp"
#include "entroflow/entropyflow.hpp"
#include "entroflow/errors.hpp"
#include "entroflow/groupsem.hpp"
#include "entroflow/parallel.hpp"
#include "entroflow/random.hpp"
#include "entroflow/sampling.hpp"
#include "entroflow/subalg.hpp"

#ifndef ENTROFLOW_VERSION
#define ENTROFLOW_VERSION "unknown"
#endif

namespace entroflow::cli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Stream offsets keep the per-command random families disjoint.
constexpr std::uint64_t kStreamDebruijn = 1ULL << 32;
constexpr std::uint64_t kStreamSubalg = 2ULL << 32;

/// Collects named checks: value compared against a threshold.
class CheckList {
 public:
  void at_most(const std::string& name, double value, double bound) { add(name, value, bound, "<=", value <= bound); }
  void at_least(const std::string& name, double value, double bound) { add(name, value, bound, ">=", value >= bound); }
  void flag(const std::string& name, bool ok) {
    Json c = Json::object();
    c["name"] = name;
    c["pass"] = ok;
    checks_.push_back(std::move(c));
    pass_ = pass_ && ok;
  }
  bool pass() const { return pass_; }
  const Json& json() const { return checks_; }

 private:
  void add(const std::string& name, double value, double bound, const char* op, bool ok) {
    ok = ok && !std::isnan(value);
    Json c = Json::object();
    c["name"] = name;
    c["value"] = number_to_json(value);
    c["comparison"] = op;
    c["bound"] = number_to_json(bound);
    c["pass"] = ok;
    checks_.push_back(std::move(c));
    pass_ = pass_ && ok;
  }
  Json checks_ = Json::array();
  bool pass_ = true;
};

Json report_header(const std::string& command, const ExperimentConfig& cfg) {
  Json j = Json::object();
  j["tool"] = {{"name", "entroflow"}, {"version", ENTROFLOW_VERSION}};
  j["command"] = command;
  j["seed"] = cfg.seed;
  j["config"] = cfg.to_json();
  j["wall_clock"] = "timing.json";
  return j;
}

void finish(Json& report, const CheckList& checks) {
  report["checks"] = checks.json();
  report["pass"] = checks.pass();
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

struct LoadedSystem {
  Generator gen;
  Density phi;
  std::string source;  // "generator", "calculus" or "ball"
  std::optional<BallSemigroup> ball;
  std::optional<DiffCalculus> calc;
};

BallSemigroup build_from_ball_input(const BallInput& in) {
  const GroupBall ball = enumerate_ball(in.kind, in.generators, in.radius);
  return build_ball_semigroup(ball, resolve_weights(ball, in.weights));
}

LoadedSystem load_system(const std::string& path) {
  const Json j = read_json_file(path);
  LoadedSystem s;
  if (is_ball_spec(j)) {
    s.ball = build_from_ball_input(ball_input_from_json(j));
    s.gen = s.ball->generator;
    s.phi = s.ball->phi;
    s.calc = ball_calculus(*s.ball);
    s.source = "ball";
    return s;
  }
  if (j.is_object() && j.contains("projections")) {
    s.calc = calculus_from_json(j);
    s.gen = s.calc->schur_generator();
    s.phi = s.calc->phi();
    s.source = "calculus";
    return s;
  }
  s.gen = build_generator(generator_spec_from_json(j));
  const InvariantStates inv = invariant_states(s.gen);
  if (!inv.has_faithful) throw DomainError("generator admits no faithful invariant state");
  s.phi = *inv.faithful_state;
  s.source = "generator";
  return s;
}

MlsiOptions mlsi_options(const ExperimentConfig& cfg) {
  MlsiOptions o;
  o.sampler = cfg.sampler;
  o.seed = cfg.seed;
  o.workers = cfg.workers;
  o.t_grid = cfg.t_grid.points();
  o.nm_budget = cfg.nm_budget;
  o.nm_restarts = cfg.nm_restarts;
  return o;
}

double mlsi_violation(const Generator& gen, const FixedPointData& fp, const Density& psi, double beta) {
  const Density ref(fp.expectation_star.apply(psi.op()));
  const EntropyPair ep = entropy_and_production(gen, psi, ref);
  return beta * ep.entropy - ep.production;
}

/// Block-diagonal parts of x in the basis of spec.
BlockState block_parts(const SubalgebraSpec& spec, const Matrix& x) {
  const Matrix u = spec.basis();
  const Matrix y = u.adjoint() * x * u;
  BlockState out;
  for (const auto& b : spec.blocks) {
    const auto n = static_cast<Eigen::Index>(b.size());
    Matrix m(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
      for (Eigen::Index c = 0; c < n; ++c) m(r, c) = y(b[static_cast<std::size_t>(r)], b[static_cast<std::size_t>(c)]);
    out.push_back(0.5 * (m + m.adjoint()));
  }
  return out;
}

SubalgebraSpec full_algebra(const SubalgebraSpec& like) {
  SubalgebraSpec f;
  f.dim = like.dim;
  f.unitary = like.unitary;
  f.blocks.emplace_back();
  for (Eigen::Index i = 0; i < like.dim; ++i) f.blocks.back().push_back(i);
  return f;
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const SizeError*>(&e)) return kSizeError;
  if (dynamic_cast<const InputError*>(&e)) return kInputError;
  if (dynamic_cast<const DomainError*>(&e) || dynamic_cast<const NumericalError*>(&e)) return kDomainError;
  return kDomainError;
}

void write_outputs(const std::string& out_dir, const CommandOutput& out, const std::string& command,
                   double wall_seconds, int workers) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw InputError("cannot create output directory " + out_dir + ": " + ec.message());
  for (const auto& [name, text] : out.files) write_text_file((fs::path(out_dir) / name).string(), text);
  Json timing = Json::object();
  timing["command"] = command;
  timing["wall_clock_seconds"] = wall_seconds;
  timing["workers"] = workers;
  write_text_file((fs::path(out_dir) / "timing.json").string(), dump_json(timing));
}

CommandOutput cmd_debruijn(const ExperimentConfig& cfg, const std::string& generator_file,
                           const std::optional<std::string>& state_file) {
  cfg.validate();
  const LoadedSystem sys = load_system(generator_file);
  std::optional<Density> supplied;
  if (state_file) {
    supplied = density_from_json(read_json_file(*state_file));
    if (supplied->dim() != sys.gen.dim()) throw InputError("state and generator dimensions differ");
  }
  const std::vector<double> times = cfg.t_grid.points();
  const int cases = supplied ? 1 : cfg.sampler.count;
  struct Case {
    double residual = 0.0;
    double alpha0 = 0.0;
  };
  const auto results = parallel_map(cases, cfg.workers, [&](int k) {
    Density rho0;
    if (supplied) {
      rho0 = *supplied;
    } else {
      Rng rng(cfg.seed, kStreamDebruijn + static_cast<std::uint64_t>(k));
      rho0 = random_state_in_balpha(sys.phi, 5.0, rng);
    }
    const auto alpha = balpha_factor(rho0, sys.phi);
    if (!alpha) throw DomainError("initial state is outside B(sigma)");
    return Case{debruijn_residual(sys.gen, rho0, sys.phi, times), *alpha};
  });

  const double tol = cfg.tolerance("debruijn");
  double max_res = 0.0;
  Json per_case = Json::array();
  for (std::size_t k = 0; k < results.size(); ++k) {
    max_res = std::max(max_res, results[k].residual);
    per_case.push_back({{"index", k}, {"residual", results[k].residual}, {"alpha0", results[k].alpha0}});
  }
  CheckList checks;
  checks.at_most("debruijn_residual", max_res, tol);

  Json report = report_header("debruijn", cfg);
  report["input"] = {{"source", sys.source}, {"dim", sys.gen.dim()}, {"state_supplied", supplied.has_value()}};
  report["reference_state"] = density_to_json(sys.phi);
  report["step"] = 1e-4;
  report["max_residual"] = max_res;
  report["per_case"] = std::move(per_case);
  finish(report, checks);

  CommandOutput out;
  out.pass = checks.pass();
  out.files.emplace_back("debruijn_report.json", dump_json(report));
  out.summary = "debruijn: max_residual=" + fmt(max_res) + " tolerance=" + fmt(tol) + (out.pass ? " PASS" : " FAIL");
  return out;
}

CommandOutput cmd_mlsi(const ExperimentConfig& cfg, const std::string& generator_file) {
  cfg.validate();
  const LoadedSystem sys = load_system(generator_file);
  const MlsiOptions opt = mlsi_options(cfg);
  const MlsiReport rep = mlsi_estimate(sys.gen, sys.phi, opt);
  const auto samples = sample_states(sys.phi, cfg.sampler, cfg.seed);
  const DecayCertificate cert = decay_certificate(sys.gen, sys.phi, rep.beta_ratio, samples, opt.t_grid, cfg.workers);

  CheckList checks;
  if (std::isfinite(rep.beta_fit)) checks.at_least("beta_fit_vs_ratio", rep.beta_fit, rep.beta_ratio - cfg.tolerance("beta_consistency"));
  checks.flag("decay_certificate_at_beta_ratio", cert.holds);
  if (sys.ball) checks.at_least("beta_ratio_rate_2", rep.beta_ratio, 2.0 - cfg.tolerance("beta_margin"));

  Json report = report_header("mlsi", cfg);
  report["input"] = {{"source", sys.source}, {"dim", sys.gen.dim()}};
  report["mlsi"] = mlsi_report_to_json(rep);
  report["decay_certificate"] = {{"beta", cert.beta},
                                 {"holds", cert.holds},
                                 {"worst_margin", number_to_json(cert.worst_margin)},
                                 {"worst_index", cert.worst_index},
                                 {"worst_time", cert.worst_time}};
  finish(report, checks);

  CommandOutput out;
  out.pass = checks.pass();
  out.files.emplace_back("mlsi_report.json", dump_json(report));
  out.files.emplace_back("mlsi_worst_trajectory.csv", trajectory_to_csv(rep.worst_trajectory));
  out.summary = "mlsi: beta_ratio=" + fmt(rep.beta_ratio) + " beta_fit=" + fmt(rep.beta_fit) + (out.pass ? " PASS" : " FAIL");
  return out;
}

CommandOutput cmd_freegroup(const ExperimentConfig& cfg, const std::string& kind, int k, int radius,
                            const std::string& weights) {
  cfg.validate();
  BallInput in;
  in.kind = group_kind_from_string(kind);
  in.generators = k;
  in.radius = radius;
  if (weights == "uniform") {
    in.weights = "uniform";
  } else if (weights.rfind("gibbs:", 0) == 0) {
    try {
      in.weights = {{"gibbs", std::stod(weights.substr(6))}};
    } catch (const std::exception&) {
      throw InputError("weights: cannot parse gibbs parameter in \"" + weights + "\"");
    }
  } else {
    in.weights = read_json_file(weights);
  }
  const BallSemigroup sg = build_from_ball_input(in);
  const DiffCalculus calc = ball_calculus(sg);
  const Generator& gen = sg.generator;
  const IntertwineFamily fam{calc, 1.0};

  CheckList checks;
  Json report = report_header("freegroup", cfg);
  report["ball"] = {{"kind", group_kind_name(in.kind)}, {"generators", k}, {"radius", radius}, {"size", sg.ball.size()}};

  // Eigenvalue relation on interior rows.
  Json eig = Json::array();
  double eig_err = 0.0;
  for (double t : cfg.cp_times) {
    for (const EigenvalueRow& row : eigenvalue_table(sg, t)) {
      eig_err = std::max(eig_err, row.max_error);
      eig.push_back({{"t", t},
                     {"g", word_to_json(row.word)},
                     {"length", row.length},
                     {"observed_rate", number_to_json(row.observed_rate)},
                     {"max_error", row.max_error}});
    }
  }
  report["eigenvalue_table"] = std::move(eig);
  checks.at_most("eigenvalue_relation", eig_err, cfg.tolerance("eigen"));

  const double gns = gns_symmetry_residual(gen, sg.phi);
  report["gns_residual"] = gns;
  checks.at_most("gns_symmetry", gns, cfg.tolerance("gns"));

  double inter = 0.0;
  Json cp = Json::array();
  double cp_min[2] = {kInf, kInf};
  for (double t : cfg.cp_times) {
    inter = std::max(inter, intertwining_residual(fam, gen, t));
    for (ModuleSide side : {ModuleSide::left, ModuleSide::right}) {
      const CpDominanceResult r = cp_dominance_check(fam, gen, t, side);
      const int s = side == ModuleSide::left ? 0 : 1;
      cp_min[s] = std::min(cp_min[s], r.min_eigenvalue);
      cp.push_back({{"t", t},
                    {"side", s == 0 ? "left" : "right"},
                    {"min_eigenvalue", r.min_eigenvalue},
                    {"worst_component", r.worst_component}});
    }
  }
  report["intertwining_residual"] = inter;
  report["cp_dominance"] = {{"K", 1.0}, {"per_time", std::move(cp)}};
  checks.at_most("intertwining_residual", inter, cfg.tolerance("intertwining"));
  checks.at_least("cp_dominance_left", cp_min[0], -cfg.tolerance("cp"));
  checks.at_least("cp_dominance_right", cp_min[1], -cfg.tolerance("cp"));

  // Rate-2 inequalities on sampled states.
  const MlsiOptions opt = mlsi_options(cfg);
  const FixedPointData fp = fixed_point_expectation(gen, sg.phi);
  const auto samples = sample_states(sg.phi, cfg.sampler, cfg.seed);
  struct PerSample {
    double fm = 0.0;
    double mlsi = 0.0;
  };
  const auto per = parallel_map(static_cast<int>(samples.size()), cfg.workers, [&](int i) {
    const Density& psi = samples[static_cast<std::size_t>(i)];
    return PerSample{fm_check(gen, fp, psi, 2.0, opt.t_grid), mlsi_violation(gen, fp, psi, 2.0)};
  });
  double fm_worst = -kInf, mlsi_worst = -kInf;
  int fm_idx = -1, mlsi_idx = -1;
  for (std::size_t i = 0; i < per.size(); ++i) {
    if (per[i].fm > fm_worst) fm_worst = per[i].fm, fm_idx = static_cast<int>(i);
    if (per[i].mlsi > mlsi_worst) mlsi_worst = per[i].mlsi, mlsi_idx = static_cast<int>(i);
  }
  report["fm2"] = {{"max_violation", fm_worst}, {"worst_index", fm_idx}, {"samples", samples.size()}};
  report["mlsi2"] = {{"max_violation", mlsi_worst}, {"worst_index", mlsi_idx}, {"samples", samples.size()}};
  checks.at_most("fm2_violation", fm_worst, cfg.tolerance("fm"));
  checks.at_most("mlsi2_violation", mlsi_worst, cfg.tolerance("mlsi"));

  const MlsiReport rep = mlsi_estimate(gen, sg.phi, opt);
  report["mlsi"] = mlsi_report_to_json(rep);
  checks.at_least("beta_ratio_rate_2", rep.beta_ratio, 2.0 - cfg.tolerance("beta_margin"));
  finish(report, checks);

  CommandOutput out;
  out.pass = checks.pass();
  out.files.emplace_back("ball.json", dump_json(ball_to_json(sg.ball)));
  out.files.emplace_back("semigroup.json", dump_json(semigroup_to_json(sg)));
  out.files.emplace_back("freegroup_report.json", dump_json(report));
  out.files.emplace_back("mlsi_worst_trajectory.csv", trajectory_to_csv(rep.worst_trajectory));
  out.summary = "freegroup: size=" + std::to_string(sg.ball.size()) + " beta_ratio=" + fmt(rep.beta_ratio) +
                " fm2=" + fmt(fm_worst) + (out.pass ? " PASS" : " FAIL");
  return out;
}

CommandOutput cmd_intertwine(const ExperimentConfig& cfg, const std::string& input_file, double K) {
  cfg.validate();
  if (!(K > 0) || !std::isfinite(K)) throw InputError("K must be positive");
  const Json j = read_json_file(input_file);
  if (!is_ball_spec(j) && !(j.is_object() && j.contains("projections")))
    throw DomainError("input is not a commuting-projection calculus (expected \"projections\" or \"ball\")");
  const LoadedSystem sys = load_system(input_file);
  const IntertwineFamily fam{*sys.calc, K};
  const double tol = cfg.tolerance("cp");

  CheckList checks;
  Json per_time = Json::array();
  double inter = 0.0;
  double worst = kInf;
  Json witness;
  for (double t : cfg.cp_times) {
    const double r = intertwining_residual(fam, sys.gen, t);
    inter = std::max(inter, r);
    Json entry = {{"t", t}, {"intertwining_residual", r}};
    for (ModuleSide side : {ModuleSide::left, ModuleSide::right}) {
      const CpDominanceResult c = cp_dominance_check(fam, sys.gen, t, side);
      const char* name = side == ModuleSide::left ? "left" : "right";
      Json comps = Json::array();
      for (double e : c.per_component) comps.push_back(e);
      entry[name] = {{"min_eigenvalue", c.min_eigenvalue}, {"worst_component", c.worst_component}, {"per_component", comps}};
      if (c.min_eigenvalue < worst) {
        worst = c.min_eigenvalue;
        witness = {{"t", t}, {"side", name}, {"component", c.worst_component}, {"min_eigenvalue", c.min_eigenvalue}};
        if (sys.ball) witness["label"] = word_to_json(sys.ball->projection_labels[c.worst_component]);
      }
    }
    per_time.push_back(std::move(entry));
  }
  checks.at_most("intertwining_residual", inter, cfg.tolerance("intertwining"));
  checks.at_least("cp_dominance", worst, -tol);

  Json report = report_header("intertwine", cfg);
  report["input"] = {{"source", sys.source}, {"dim", sys.gen.dim()}, {"components", sys.calc->size()}};
  report["K"] = K;
  report["per_time"] = std::move(per_time);
  report["witness"] = worst < -tol ? witness : Json(nullptr);

  // With the hypotheses certified, CFM(2K) must show on sampled states.
  if (checks.pass()) {
    const FixedPointData fp = fixed_point_expectation(sys.gen, sys.phi);
    const auto samples = sample_states(sys.phi, cfg.sampler, cfg.seed);
    const auto t_grid = cfg.t_grid.points();
    const auto fm = parallel_map(static_cast<int>(samples.size()), cfg.workers, [&](int i) {
      return fm_check(sys.gen, fp, samples[static_cast<std::size_t>(i)], 2.0 * K, t_grid);
    });
    const double fm_worst = *std::max_element(fm.begin(), fm.end());
    report["fm"] = {{"beta", 2.0 * K}, {"max_violation", fm_worst}, {"samples", samples.size()}};
    checks.at_most("fm_implied", fm_worst, cfg.tolerance("fm"));
  }
  finish(report, checks);

  CommandOutput out;
  out.pass = checks.pass();
  out.files.emplace_back("intertwine_report.json", dump_json(report));
  out.summary = "intertwine: K=" + fmt(K) + " min_choi=" + fmt(worst) + " residual=" + fmt(inter) +
                (out.pass ? " PASS" : " FAIL");
  return out;
}

CommandOutput cmd_subalg(const ExperimentConfig& cfg, const std::string& spec_file) {
  cfg.validate();
  const Json j = read_json_file(spec_file);
  std::vector<SubalgebraSpec> chain;
  if (j.is_object() && j.contains("chain")) {
    if (!j["chain"].is_array() || j["chain"].empty()) throw InputError("subalg: chain must be a non-empty array");
    for (const Json& s : j["chain"]) chain.push_back(subalgebra_from_json(s));
  } else {
    chain.push_back(subalgebra_from_json(j));
    if (chain.front().blocks.size() != 1) chain.push_back(full_algebra(chain.front()));
  }
  for (std::size_t n = 0; n + 1 < chain.size(); ++n)
    if (!chain[n].contained_in(chain[n + 1])) throw InputError("subalg: chain is not nested");
  if (chain.back().blocks.size() != 1) throw InputError("subalg: chain must end at the full algebra");
  const Eigen::Index d = chain.front().dim;

  std::vector<SuperOperator> expectations;
  for (const auto& s : chain) expectations.push_back(conditional_expectation(s));
  const Generator gen = build_generator(RawSpec{SuperOperator::identity(d) - expectations.front()});

  struct Instance {
    double expectation = 0.0;  // idempotence, unitality, phi o E = phi
    double cp = 0.0;           // min Choi eigenvalue
    double extension = 0.0;
    double projection = 0.0;
    double martingale_drop = 0.0;
    double martingale_final = 0.0;
    double chain_rule = 0.0;
    double data_processing = 0.0;
    double double_expectation = 0.0;
    std::vector<double> sequence;
  };
  const auto results = parallel_map(cfg.sampler.count, cfg.workers, [&](int k) {
    Rng rng(cfg.seed, kStreamSubalg + static_cast<std::uint64_t>(k));
    const Density phi(expectations.front().apply(random_faithful_density(d, rng).op()));
    const Density psi = random_faithful_density(d, rng);
    const Density psi_n = random_faithful_density(d, rng);
    Instance r;
    r.cp = kInf;
    for (std::size_t n = 0; n < chain.size(); ++n) {
      const SuperOperator& e = expectations[n];
      const SuperOperator e2 = conditional_expectation(chain[n], phi);
      r.expectation = std::max({r.expectation, (e * e - e).matrix().cwiseAbs().maxCoeff(),
                                (e.apply(Matrix::Identity(d, d)) - Matrix::Identity(d, d)).cwiseAbs().maxCoeff(),
                                (e.trace_dual().apply(phi.matrix()) - phi.matrix()).cwiseAbs().maxCoeff(),
                                (e2.matrix() - e.matrix()).cwiseAbs().maxCoeff()});
      r.cp = std::min(r.cp, min_eig(choi_matrix(e)));
      const BlockState psi_b = block_parts(chain[n], e.apply(psi.matrix()));
      const BlockState phi_b = block_parts(chain[n], phi.matrix());
      const ExtensionEntropies ext = entropy_extension_check(chain[n], psi_b, phi_b);
      r.extension = std::max(r.extension, std::abs(ext.extended - ext.restricted));
      r.projection = std::max(r.projection, rel_hamiltonian_projection_check(chain[n], psi_b, phi_b));
      const double before = rel_entropy(psi, psi_n).value();
      const double after = rel_entropy(Density(e.apply(psi.op())), Density(e.apply(psi_n.op()))).value();
      r.data_processing = std::max(r.data_processing, after - before);
      for (std::size_t m = n; m < chain.size(); ++m)
        r.double_expectation =
            std::max(r.double_expectation, (e * expectations[m] - e).matrix().cwiseAbs().maxCoeff());
    }
    r.sequence = martingale_entropy_check(chain, psi, phi);
    for (std::size_t n = 0; n + 1 < r.sequence.size(); ++n)
      r.martingale_drop = std::max(r.martingale_drop, r.sequence[n] - r.sequence[n + 1]);
    r.martingale_final = std::abs(r.sequence.back() - rel_entropy(psi, phi).value());
    r.chain_rule = chain_rule_check(gen, phi, psi, psi_n);
    return r;
  });

  Instance worst;
  worst.cp = kInf;
  Json per = Json::array();
  for (std::size_t k = 0; k < results.size(); ++k) {
    const Instance& r = results[k];
    worst.expectation = std::max(worst.expectation, r.expectation);
    worst.cp = std::min(worst.cp, r.cp);
    worst.extension = std::max(worst.extension, r.extension);
    worst.projection = std::max(worst.projection, r.projection);
    worst.martingale_drop = std::max(worst.martingale_drop, r.martingale_drop);
    worst.martingale_final = std::max(worst.martingale_final, r.martingale_final);
    worst.chain_rule = std::max(worst.chain_rule, r.chain_rule);
    worst.data_processing = std::max(worst.data_processing, r.data_processing);
    worst.double_expectation = std::max(worst.double_expectation, r.double_expectation);
    per.push_back({{"index", k}, {"martingale", r.sequence}, {"extension_gap", r.extension},
                   {"chain_rule", r.chain_rule}});
  }
  const double tol = cfg.tolerance("subalg");
  const double mtol = cfg.tolerance("martingale");
  CheckList checks;
  checks.at_most("expectation_properties", worst.expectation, cfg.tolerance("expectation"));
  checks.at_least("expectation_cp", worst.cp, -cfg.tolerance("expectation"));
  checks.at_most("entropy_extension", worst.extension, tol);
  checks.at_most("rel_hamiltonian_projection", worst.projection, tol);
  checks.at_most("martingale_monotone", worst.martingale_drop, mtol);
  checks.at_most("martingale_final", worst.martingale_final, mtol);
  checks.at_most("chain_rule", worst.chain_rule, tol);
  checks.at_most("data_processing", worst.data_processing, tol);
  checks.at_most("double_expectation", worst.double_expectation, cfg.tolerance("expectation"));

  Json report = report_header("subalg", cfg);
  Json specs = Json::array();
  for (const auto& s : chain) specs.push_back(subalgebra_to_json(s));
  report["chain"] = std::move(specs);
  report["instances"] = results.size();
  report["per_instance"] = std::move(per);
  finish(report, checks);

  CommandOutput out;
  out.pass = checks.pass();
  out.files.emplace_back("subalg_report.json", dump_json(report));
  out.summary = "subalg: levels=" + std::to_string(chain.size()) + " instances=" + std::to_string(results.size()) +
                (out.pass ? " PASS" : " FAIL");
  return out;
}

}  // namespace entroflow::cli
