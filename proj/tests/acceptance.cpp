// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "entroflow/calculus.hpp"
#include "entroflow/cli/commands.hpp"
#include "entroflow/entropyflow.hpp"
#include "entroflow/errors.hpp"
#include "entroflow/groupsem.hpp"
#include "entroflow/qms.hpp"
#include "entroflow/sampling.hpp"
#include "entroflow/serialize.hpp"
#include "entroflow/subalg.hpp"

using namespace entroflow;

namespace {

constexpr std::uint64_t kSeed = 20240517;

std::string spec(const std::string& name) { return std::string(ENTROFLOW_SPECS_DIR) + "/" + name; }

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double trace_distance(const Matrix& a, const Matrix& b) { return trace_norm(HermitianOperator(a - b)); }

// Criterion 1
Outcome debruijn_identity() {
  double worst = 0.0;
  int used = 0;
  for (int k = 0; k < 20; ++k) {
    const Eigen::Index d = 2 + k % 3;
    Rng rng(kSeed, 100 + static_cast<std::uint64_t>(k));
    const Generator gen = build_generator(random_gkls_spec(d, 2, rng));
    const InvariantStates inv = invariant_states(gen);
    if (!inv.has_faithful) return {false, "generator " + std::to_string(k) + " has no faithful invariant state"};
    const Density rho0 = random_state_in_balpha(*inv.faithful_state, 5.0, rng);
    worst = std::max(worst, debruijn_residual(gen, rho0, *inv.faithful_state, linear_grid(2.0, 11), 1e-4));
    ++used;
  }
  return {worst <= 1e-5, std::to_string(used) + " generators, max residual " + fmt("%.3e", worst)};
}

// Criterion 2
Outcome mlsi_equivalence() {
  const Generator gen = build_generator(depolarizing_spec(2));
  const Density phi = Density::maximally_mixed(2);
  double oracle = INFINITY;
  for (int k = 1; k < 1000; ++k) {
    const double r = k / 1000.0;
    const double a = (1 + r) / 2, b = (1 - r) / 2;
    const double forward = std::log(2.0) + a * std::log(a) + b * std::log(b);
    const double backward = -0.5 * std::log(1 - r * r);
    if (forward > 1e-12) oracle = std::min(oracle, 1.0 + backward / forward);
  }
  MlsiOptions opt;
  opt.seed = kSeed;
  const MlsiReport rep = mlsi_estimate(gen, phi, opt);
  std::vector<Density> samples = sample_states(phi, opt.sampler, opt.seed);
  samples.push_back(rep.worst_state);
  const bool at = decay_certificate(gen, phi, rep.beta_ratio, samples, opt.t_grid).holds;
  const bool above = decay_certificate(gen, phi, 1.5 * rep.beta_ratio, samples, opt.t_grid).holds;
  const double rel = std::abs(rep.beta_ratio - oracle) / oracle;
  return {rel <= 0.05 && at && !above,
          "beta_ratio " + fmt("%.6f", rep.beta_ratio) + ", oracle " + fmt("%.6f", oracle) + ", relative gap " +
              fmt("%.2e", rel) + ", certificate at beta " + (at ? "holds" : "fails") + ", at 1.5 beta " +
              (above ? "holds" : "fails")};
}

std::string failed_checks(const Json& report) {
  std::string out;
  for (const auto& c : report["checks"])
    if (!c["pass"].get<bool>()) out += (out.empty() ? "" : ",") + c["name"].get<std::string>();
  return out;
}

Json report_of(const cli::CommandOutput& out, const std::string& name) {
  for (const auto& [file, text] : out.files)
    if (file == name) return Json::parse(text);
  throw Error("missing report " + name);
}

std::map<std::string, cli::CommandOutput> g_first_runs;  // reused by the determinism check

// Criterion 3
Outcome example_rate() {
  cli::ExperimentConfig cfg;
  cfg.seed = kSeed;
  Outcome o;
  for (auto [kind, k] : {std::pair<const char*, int>{"free_group", 2}, {"free_coxeter", 3}}) {
    const cli::CommandOutput out = cli::cmd_freegroup(cfg, kind, k, 2);
    g_first_runs[std::string("freegroup_") + kind] = out;
    const Json rep = report_of(out, "freegroup_report.json");
    double beta = 0.0;
    for (const auto& c : rep["checks"])
      if (c["name"] == "beta_ratio_rate_2") beta = c["value"].get<double>();
    o.pass = o.pass && out.pass;
    o.detail += std::string(o.detail.empty() ? "" : "; ") + kind + "(" + std::to_string(k) + ") R=2: " +
                (out.pass ? "all checks pass" : "failed " + failed_checks(rep)) + ", beta_ratio " + fmt("%.5f", beta);
  }
  return o;
}

// Criterion 4
Outcome resolvent() {
  double worst_norm_excess = -INFINITY, worst_final = 0.0;
  bool monotone = true;
  for (int k = 0; k < 10; ++k) {
    Rng rng(kSeed, 400 + static_cast<std::uint64_t>(k));
    const Density mixed = Density::maximally_mixed(3);
    const Density rho(random_hs_density(3, rng).op() * 0.5 + mixed.op() * 0.5);
    const Density sigma(random_hs_density(3, rng).op() * 0.5 + mixed.op() * 0.5);
    const double log_alpha = std::log(*balpha_factor(rho, sigma));
    const Matrix exact = rel_hamiltonian(rho, sigma).matrix();
    double prev = INFINITY;
    for (int n : {1, 3, 10, 30, 100, 300, 1000}) {
      const Matrix xn = resolvent_log_approx(rho, sigma, n, 200).matrix();
      worst_norm_excess = std::max(worst_norm_excess, operator_norm(HermitianOperator(xn)) - log_alpha);
      const double err = operator_norm(HermitianOperator(xn - exact));
      if (err > prev + 1e-12) monotone = false;
      prev = err;
    }
    worst_final = std::max(worst_final, prev);
  }
  return {worst_norm_excess <= 1e-8 && monotone && worst_final <= 1e-2,
          "max(|x_n| - log alpha) " + fmt("%.3e", worst_norm_excess) + ", error decreasing " +
              (monotone ? "yes" : "no") + ", max error at n=1000 " + fmt("%.3e", worst_final)};
}

// Criterion 5
Outcome pinsker() {
  double worst = INFINITY;
  for (Eigen::Index d : {2, 3}) {
    Rng rng(kSeed, 500 + static_cast<std::uint64_t>(d));
    for (int k = 0; k < 1000; ++k) {
      const Density rho = random_hs_density(d, rng), sigma = random_hs_density(d, rng);
      worst = std::min(worst, pinsker_gap(rho, sigma));
    }
  }
  return {worst >= -1e-10, "2000 pairs, min gap " + fmt("%.3e", worst)};
}

// Criterion 6
SubalgebraSpec with_blocks(Eigen::Index d, const Matrix& u, std::vector<std::vector<Eigen::Index>> blocks) {
  SubalgebraSpec s;
  s.dim = d;
  s.blocks = std::move(blocks);
  s.unitary = u;
  return s;
}

BlockState compress(const SubalgebraSpec& s, const Density& rho) {
  const Matrix r = s.unitary->adjoint() * rho.matrix() * *s.unitary;
  BlockState out;
  for (const auto& b : s.blocks) {
    const auto n = static_cast<Eigen::Index>(b.size());
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) m(i, j) = r(b[static_cast<std::size_t>(i)], b[static_cast<std::size_t>(j)]);
    out.push_back(m);
  }
  return out;
}

Outcome subalgebras() {
  std::map<std::string, double> worst;
  auto note = [&](const std::string& k, double v) { worst[k] = std::max(worst[k], v); };
  for (int k = 0; k < 50; ++k) {
    const Eigen::Index d = 2 + k % 5;
    Rng rng(kSeed, 600 + static_cast<std::uint64_t>(k));
    const Matrix u = random_unitary(d, rng);
    // Middle algebra: consecutive runs of a random permutation.
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(d));
    for (Eigen::Index i = 0; i < d; ++i) perm[static_cast<std::size_t>(i)] = i;
    for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.next_u64() % i]);
    std::vector<std::vector<Eigen::Index>> mid{{}};
    for (std::size_t i = 0; i < perm.size(); ++i) {
      if (i > 0 && rng.uniform() < 0.4) mid.emplace_back();
      mid.back().push_back(perm[i]);
    }
    std::vector<std::vector<Eigen::Index>> singles, all{perm};
    for (Eigen::Index i = 0; i < d; ++i) singles.push_back({i});
    const std::vector<SubalgebraSpec> chain{with_blocks(d, u, singles), with_blocks(d, u, mid), with_blocks(d, u, all)};
    const SubalgebraSpec& n = chain[1];
    const SuperOperator e = conditional_expectation(n);

    const Density phi(HermitianOperator(e.apply(random_faithful_density(d, rng).matrix())));
    const Density psi = random_faithful_density(d, rng), psi_n = random_faithful_density(d, rng);

    const ExtensionEntropies ext = entropy_extension_check(n, compress(n, psi), compress(n, phi));
    note("extension", std::abs(ext.extended - ext.restricted));
    note("projection", rel_hamiltonian_projection_check(n, compress(n, psi), compress(n, phi)));

    const auto mart = martingale_entropy_check(chain, psi, phi);
    for (std::size_t i = 1; i < mart.size(); ++i) note("martingale_drop", mart[i - 1] - mart[i]);
    note("martingale_final", std::abs(mart.back() - rel_entropy(psi, phi).value()));

    const Generator gen = build_generator(RawSpec{SuperOperator::identity(d) - e});
    note("chain_rule", chain_rule_check(gen, phi, psi, psi_n));

    const Density epsi(HermitianOperator(e.apply(psi.matrix())));
    note("data_processing", rel_entropy(epsi, phi).value() - rel_entropy(psi, phi).value());
    note("double_expectation", trace_distance(e.apply(epsi.matrix()), epsi.matrix()));
    note("phi_invariance", trace_distance(e.apply(phi.matrix()), phi.matrix()));
  }
  bool ok = true;
  std::string detail = "50 instances";
  for (const auto& [name, v] : worst) {
    const double tol = name.rfind("martingale", 0) == 0 ? 1e-10 : 1e-9;
    ok = ok && v <= tol;
    detail += ", " + name + " " + fmt("%.2e", v);
  }
  return {ok, detail};
}

// Criterion 7
Outcome long_time() {
  struct Case {
    std::string name;
    Generator gen;
    Density phi;
  };
  std::vector<Case> cases;
  cases.push_back({"depolarizing(2)", build_generator(depolarizing_spec(2)), Density::maximally_mixed(2)});
  cases.push_back({"depolarizing(3)", build_generator(depolarizing_spec(3)), Density::maximally_mixed(3)});
  cases.push_back({"blocks(2+2)", build_generator(block_depolarizing_spec({2, 2})), Density::maximally_mixed(4)});
  {
    const BallSemigroup sg = build_ball_semigroup(enumerate_ball(GroupKind::free_group, 2, 1),
                                                  uniform_weights(enumerate_ball(GroupKind::free_group, 2, 1)));
    cases.push_back({"free_group(2) R=1", sg.generator, sg.phi});
  }
  bool ok = true;
  std::string detail;
  for (const Case& c : cases) {
    if (gns_symmetry_residual(c.gen, c.phi) > 1e-10) continue;
    const double gap = spectral_gap(c.gen, c.phi);
    MlsiOptions opt;
    opt.seed = kSeed;
    opt.sampler.count = 40;
    opt.nm_restarts = 3;
    const double beta = mlsi_estimate(c.gen, c.phi, opt).beta_ratio;
    const FixedPointData fp = fixed_point_expectation(c.gen, c.phi);
    double final_dist = 0.0, bound_excess = -INFINITY;
    for (int k = 0; k < 5; ++k) {
      Rng rng(kSeed, 700 + static_cast<std::uint64_t>(k));
      const Density psi = random_faithful_density(c.gen.dim(), rng);
      const Matrix target = fp.expectation_star.apply(psi.matrix());
      const double d0 = rel_entropy(psi, Density(HermitianOperator(target))).value();
      const double t_end = 50.0 / gap;
      for (double t : linear_grid(std::min(t_end, 10.0 / beta), 41)) {
        const double dist = trace_distance(evolve(c.gen, psi, t).matrix(), target);
        bound_excess = std::max(bound_excess, dist - std::sqrt(2.0 * std::exp(-beta * t) * d0) - 1e-12);
      }
      final_dist = std::max(final_dist, trace_distance(evolve(c.gen, psi, t_end).matrix(), target));
    }
    const bool pass = final_dist <= 1e-6 && bound_excess <= 0.0;
    ok = ok && pass;
    detail += (detail.empty() ? "" : "; ") + c.name + ": gap " + fmt("%.4f", gap) + ", beta " + fmt("%.4f", beta) +
              ", final distance " + fmt("%.1e", final_dist) + ", bound excess " + fmt("%.1e", bound_excess);
  }
  return {ok, detail};
}

// Criterion 8
Outcome determinism() {
  using Runner = std::function<cli::CommandOutput(const cli::ExperimentConfig&)>;
  const std::vector<std::pair<std::string, Runner>> runs{
      {"debruijn", [](const auto& c) { return cli::cmd_debruijn(c, spec("depolarizing_qubit.json")); }},
      {"mlsi", [](const auto& c) { return cli::cmd_mlsi(c, spec("depolarizing_qubit.json")); }},
      {"freegroup_free_group", [](const auto& c) { return cli::cmd_freegroup(c, "free_group", 2, 2); }},
      {"freegroup_free_coxeter", [](const auto& c) { return cli::cmd_freegroup(c, "free_coxeter", 3, 2); }},
      {"intertwine", [](const auto& c) { return cli::cmd_intertwine(c, spec("free_coxeter_ball.json"), 1.0); }},
      {"subalg", [](const auto& c) { return cli::cmd_subalg(c, spec("chain_dim4.json")); }},
  };
  bool ok = true;
  std::string mismatched;
  for (const auto& [name, run] : runs) {
    cli::ExperimentConfig cfg;
    cfg.seed = kSeed;
    const auto cached = g_first_runs.find(name);
    const cli::CommandOutput base = cached != g_first_runs.end() ? cached->second : run(cfg);
    for (int w : {4, 8}) {
      cfg.workers = w;
      if (run(cfg).files != base.files) {
        ok = false;
        mismatched += " " + name + "@" + std::to_string(w);
      }
    }
  }
  return {ok, ok ? "6 commands identical at workers 1, 4, 8" : "mismatch:" + mismatched};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_seconds;  // 0 means no runtime bound
    Outcome (*fn)();
  };
  const Criterion criteria[] = {
      {1, "deBruijn identity", 60, debruijn_identity},
      {2, "MLSI and entropy decay on the depolarizing qubit", 30, mlsi_equivalence},
      {3, "rate 2 on free group and free Coxeter balls", 300, example_rate},
      {4, "resolvent approximation", 10, resolvent},
      {5, "Pinsker inequality", 10, pinsker},
      {6, "subalgebra entropy identities", 30, subalgebras},
      {7, "long-time convergence", 30, long_time},
      {8, "determinism across worker counts", 0, determinism},
  };
  bool all = true;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_seconds > 0 && secs > c.limit_seconds) {
      o.pass = false;
      o.detail += ", runtime over " + fmt("%.0f", c.limit_seconds) + " s";
    }
    all = all && o.pass;
    std::printf("criterion %d %s: %s (%.1f s) %s\n", c.id, c.name, o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
