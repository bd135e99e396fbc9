#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "entroflow/entropyflow.hpp"
#include "entroflow/errors.hpp"
#include "support.hpp"

using namespace entroflow;
using namespace testing_support;

namespace {

Generator random_faithful_gkls(Eigen::Index d, Rng& rng) {
  for (;;) {
    const Generator g = build_generator(random_gkls_spec(d, 2, rng));
    if (invariant_states(g).has_faithful) return g;
  }
}

/// Ratio I/D for the depolarizing qubit at Bloch radius r (E* psi = I/2).
double qubit_ratio(double r) {
  const double d_forward = qubit_entropy_vs_mixed(r);
  const double d_backward = -0.5 * std::log(1 - r * r);
  return 1.0 + d_backward / d_forward;
}

double grid_oracle() {
  double best = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 1000; ++k) best = std::min(best, qubit_ratio(k / 1000.0));
  return best;
}

MlsiOptions small_options(std::uint64_t seed) {
  MlsiOptions o;
  o.seed = seed;
  o.sampler.count = 40;
  o.nm_restarts = 3;
  o.nm_budget = 200;
  return o;
}

}  // namespace

TEST_SUITE("entropyflow") {
  TEST_CASE("entropy production examples") {
    const Generator dep = build_generator(depolarizing_spec(2));
    const Density mm = Density::maximally_mixed(2);
    CHECK(std::abs(entropy_production(dep, mm, mm)) < 1e-14);
    const Density rho = diag_density({0.8, 0.2});
    const double oracle = rel_entropy(rho, mm).value() + rel_entropy(mm, rho).value();
    CHECK(entropy_production(dep, rho, mm) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK_THROWS_AS(entropy_production(dep, diag_density({1.0, 0.0}), mm), DomainError);
    CHECK_THROWS_AS(entropy_production(dep, rho, diag_density({0.3, 0.7})), DomainError);
  }

  TEST_CASE("entropy production is the negative entropy derivative") {
    Rng rng(1);
    for (int k = 0; k < 10; ++k) {
      const Generator g = random_faithful_gkls(3, rng);
      const Density sigma = *invariant_states(g).faithful_state;
      const Density rho = random_state_in_balpha(sigma, 5.0, rng);
      const double i = entropy_production(g, rho, sigma);
      CHECK(i >= -1e-10);
      const double h = 1e-4;
      const double t = 0.3;
      const double dd = (rel_entropy(evolve(g, rho, t + h), sigma).value() - rel_entropy(evolve(g, rho, t - h), sigma).value()) / (2 * h);
      CHECK(std::abs(dd + entropy_production(g, evolve(g, rho, t), sigma)) < 1e-6);
      const EntropyPair p = entropy_and_production(g, rho, sigma);
      CHECK(p.production == doctest::Approx(i).epsilon(1e-10));
      CHECK(p.entropy == doctest::Approx(rel_entropy(rho, sigma).value()).epsilon(1e-10));
    }
  }

  TEST_CASE("trajectory examples") {
    const Generator dep = build_generator(depolarizing_spec(2));
    const Density mm = Density::maximally_mixed(2);
    const auto grid = linear_grid(3.0, 31);
    const TrajectoryRecord zero = trajectory(dep, mm, mm, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      CHECK(std::abs(zero.entropies[k]) < 1e-14);
      CHECK(std::abs(zero.productions[k]) < 1e-14);
    }
    CHECK(debruijn_residual(zero).max_residual < 1e-14);

    const TrajectoryRecord rec = trajectory(dep, diag_density({0.9, 0.1}), mm, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double p = std::exp(-grid[k]) * 0.9 + (1 - std::exp(-grid[k])) * 0.5;
      CHECK(rec.entropies[k] == doctest::Approx(classical_kl({p, 1 - p}, {0.5, 0.5})).epsilon(1e-10));
    }
    CHECK_THROWS_AS(trajectory(dep, mm, mm, {1.0, 0.5}), InputError);
  }

  TEST_CASE("trajectories decay monotonically and alpha is non-increasing") {
    Rng rng(2);
    for (int k = 0; k < 5; ++k) {
      const Generator g = random_faithful_gkls(2 + k % 3, rng);
      const Density sigma = *invariant_states(g).faithful_state;
      const TrajectoryRecord rec = trajectory(g, random_state_in_balpha(sigma, 5.0, rng), sigma, linear_grid(4.0, 41));
      for (std::size_t i = 0; i + 1 < rec.times.size(); ++i) {
        CHECK(rec.entropies[i + 1] <= rec.entropies[i] + 1e-9);
        CHECK(rec.alpha_track[i + 1] <= rec.alpha_track[i] + 1e-9);
        CHECK(rec.productions[i] >= -1e-10);
        CHECK(std::isfinite(rec.entropies[i]));
      }
    }
  }

  TEST_CASE("deBruijn residual examples") {
    const Generator dep = build_generator(depolarizing_spec(2));
    const Density mm = Density::maximally_mixed(2);
    CHECK(debruijn_residual(dep, diag_density({0.9, 0.1}), mm, linear_grid(5.0, 51)) <= 1e-6);

    // Closed-form derivative oracle for the same case.
    const auto grid = linear_grid(2.0, 2001);
    const TrajectoryRecord rec = trajectory(dep, diag_density({0.9, 0.1}), mm, grid);
    const DeBruijnResult r = debruijn_residual(rec);
    CHECK_FALSE(r.coarse_grid);
    CHECK(r.max_residual <= 1e-5);
    for (std::size_t k = 0; k < grid.size(); k += 100) {
      const double e = std::exp(-grid[k]);
      const double p = e * 0.9 + (1 - e) * 0.5;
      const double dp = -e * 0.4;
      const double dd = dp * (std::log(p) - std::log(1 - p));
      CHECK(std::abs(dd + rec.productions[k]) < 1e-10);
    }
    const TrajectoryRecord coarse = trajectory(dep, diag_density({0.9, 0.1}), mm, linear_grid(2.0, 5));
    CHECK(debruijn_residual(coarse).coarse_grid);

    Rng rng(3);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      const Generator g = random_faithful_gkls(2 + k % 3, rng);
      const Density sigma = *invariant_states(g).faithful_state;
      worst = std::max(worst, debruijn_residual(g, random_state_in_balpha(sigma, 5.0, rng), sigma, linear_grid(3.0, 16)));
    }
    CHECK(worst <= 1e-5);
  }

  TEST_CASE("grids") {
    const auto l = linear_grid(2.0, 5);
    CHECK(l.size() == 5);
    CHECK(l.back() == 2.0);
    CHECK(l[1] == doctest::Approx(0.5));
    const auto g = log_grid(0.01, 10.0, 4);
    CHECK(g.front() == doctest::Approx(0.01));
    CHECK(g[1] == doctest::Approx(0.1));
    CHECK(g.back() == doctest::Approx(10.0));
    CHECK_THROWS_AS(linear_grid(0.0, 5), InputError);
    CHECK_THROWS_AS(log_grid(0.0, 1.0, 5), InputError);
  }

  TEST_CASE("mlsi_estimate on the zero generator is degenerate") {
    const Generator zero = build_generator(GklsSpec{HermitianOperator::zero(2), {}});
    CHECK_THROWS_AS(mlsi_estimate(zero, Density::maximally_mixed(2), small_options(1)), DegenerateError);
  }

  TEST_CASE("depolarizing qubit: beta_ratio matches the Bloch-radius oracle") {
    const double oracle = grid_oracle();
    CHECK(oracle == doctest::Approx(2.0).epsilon(1e-3));
    const Generator dep = build_generator(depolarizing_spec(2));
    const Density mm = Density::maximally_mixed(2);
    const MlsiReport rep = mlsi_estimate(dep, mm, small_options(7));
    CHECK(std::abs(rep.beta_ratio - oracle) <= 0.05 * oracle);
    CHECK(rep.beta_ratio >= 2.0 - 1e-6);  // infimum over all states, approached as r -> 0
    CHECK(rep.beta_fit >= rep.beta_ratio - 1e-6);
    CHECK(rep.sample_count == 40);
    CHECK(rep.worst_trajectory.times.size() == small_options(7).t_grid.size());

    // Ratio depends only on the Bloch radius.
    const double r = 0.6;
    const FixedPointData fp = fixed_point_expectation(dep, mm);
    CHECK(*mlsi_ratio(dep, fp, bloch(0, 0, r)) == doctest::Approx(qubit_ratio(r)).epsilon(1e-10));
    CHECK(*mlsi_ratio(dep, fp, bloch(r / std::sqrt(2.0), 0, r / std::sqrt(2.0))) == doctest::Approx(qubit_ratio(r)).epsilon(1e-10));
  }

  TEST_CASE("mlsi ratio is 0-homogeneous") {
    Rng rng(4);
    const Generator g = random_faithful_gkls(3, rng);
    const Density phi = *invariant_states(g).faithful_state;
    const FixedPointData fp = fixed_point_expectation(g, phi);
    const Density psi = random_state_in_balpha(phi, 5.0, rng);
    const double base = *mlsi_ratio(g, fp, psi);
    for (double c : {0.01, 0.5, 7.0}) CHECK(*mlsi_ratio(g, fp, psi.scaled(c)) == doctest::Approx(base).epsilon(1e-9));
    CHECK_FALSE(mlsi_ratio(g, fp, Density(fp.expectation_star.apply(psi.op()))).has_value());
  }

  TEST_CASE("beta_fit bounds beta_ratio on random generators") {
    Rng rng(5);
    for (int k = 0; k < 3; ++k) {
      const Generator g = random_faithful_gkls(2 + k, rng);
      const Density phi = *invariant_states(g).faithful_state;
      const MlsiReport rep = mlsi_estimate(g, phi, small_options(10 + k));
      CHECK(rep.beta_ratio > 0);
      CHECK(rep.beta_fit >= rep.beta_ratio - 1e-6);
    }
  }

  TEST_CASE("Fisher monotonicity check") {
    Eigen::MatrixXd s(3, 3);
    s << 0, 1, 2, 1, 0, 1, 2, 1, 0;
    const Generator g = build_generator(SchurSpec{s});
    const Density phi = diag_density({0.2, 0.3, 0.5});
    const FixedPointData fp = fixed_point_expectation(g, phi);
    const auto grid = linear_grid(3.0, 31);
    Rng rng(6);
    for (int k = 0; k < 10; ++k) {
      const Density psi = random_state_in_balpha(phi, 5.0, rng);
      CHECK(fm_check(g, fp, psi, 0.0, grid) <= 1e-9);
    }
    const double zero = fm_check(g, phi, phi, 1.0, grid);
    CHECK(std::abs(zero) < 1e-14);

    // Depolarizing: I(t) = e^{-2t}-ish at small radius, so FM(1) holds and FM(3) fails.
    const Generator dep = build_generator(depolarizing_spec(2));
    const Density mm = Density::maximally_mixed(2);
    CHECK(fm_check(dep, bloch(0.3, 0.1, 0.2), mm, 1.0, grid) <= 1e-9);
    CHECK(fm_check(dep, bloch(0.3, 0.1, 0.2), mm, 3.0, grid) > 1e-4);
  }

  TEST_CASE("decay certificate: equivalence with the MLSI constant") {
    const Generator dep = build_generator(depolarizing_spec(2));
    const Density mm = Density::maximally_mixed(2);
    const MlsiOptions opt = small_options(8);
    const MlsiReport rep = mlsi_estimate(dep, mm, opt);
    const auto samples = sample_states(mm, opt.sampler, opt.seed);
    CHECK(decay_certificate(dep, mm, 0.0, samples, opt.t_grid).holds);
    CHECK(decay_certificate(dep, mm, rep.beta_ratio, samples, opt.t_grid).holds);
    std::vector<Density> with_worst = samples;
    with_worst.push_back(rep.worst_state);
    const DecayCertificate fail = decay_certificate(dep, mm, 1.5 * rep.beta_ratio, with_worst, opt.t_grid);
    CHECK_FALSE(fail.holds);
    CHECK(fail.worst_margin > 0);
  }

  TEST_CASE("FM(beta) on sampled states implies the decay certificate at beta") {
    Eigen::MatrixXd s(3, 3);
    s << 0, 1, 1, 1, 0, 1, 1, 1, 0;
    const Generator g = build_generator(SchurSpec{s});
    const Density phi = diag_density({0.2, 0.3, 0.5});
    const FixedPointData fp = fixed_point_expectation(g, phi);
    SamplerConfig cfg;
    cfg.count = 20;
    const auto samples = sample_states(phi, cfg, 3);
    const auto grid = linear_grid(4.0, 41);
    for (double beta : {0.5, 1.0, 2.0}) {
      bool fm_all = true;
      for (const auto& psi : samples) fm_all = fm_all && fm_check(g, fp, psi, beta, grid) <= 1e-9;
      if (fm_all) CHECK(decay_certificate(g, phi, beta, samples, grid).holds);
    }
  }

  TEST_CASE("results do not depend on the worker count") {
    Rng rng(9);
    const Generator g = random_faithful_gkls(3, rng);
    const Density phi = *invariant_states(g).faithful_state;
    MlsiOptions a = small_options(21), b = small_options(21);
    b.workers = 4;
    const MlsiReport ra = mlsi_estimate(g, phi, a), rb = mlsi_estimate(g, phi, b);
    CHECK(ra.beta_ratio == rb.beta_ratio);
    CHECK(ra.beta_fit == rb.beta_fit);
    CHECK(max_abs(ra.worst_state.matrix() - rb.worst_state.matrix()) == 0.0);
  }
}
