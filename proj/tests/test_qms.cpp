#include <doctest.h>

#include <cmath>

#include "entroflow/errors.hpp"
#include "entroflow/log.hpp"
#include "entroflow/qms.hpp"
#include "entroflow/sampling.hpp"
#include "support.hpp"

using namespace entroflow;
using namespace testing_support;

namespace {

Generator dephasing_qubit() {
  Eigen::MatrixXd s(2, 2);
  s << 0, 1, 1, 0;
  return build_generator(SchurSpec{s});
}

Generator random_faithful_gkls(Eigen::Index d, Rng& rng) {
  for (;;) {
    const Generator g = build_generator(random_gkls_spec(d, 2, rng));
    if (invariant_states(g).has_faithful) return g;
  }
}

}  // namespace

TEST_SUITE("qms") {
  TEST_CASE("amplitude damping generator is unital and trace preserving") {
    const Generator g = build_generator(amplitude_damping_spec());
    CHECK(max_abs(g.heisenberg().apply(Matrix::Identity(2, 2))) < 1e-10);
    Rng rng(1);
    for (int k = 0; k < 5; ++k) CHECK(std::abs(g.schrodinger().apply(random_hermitian(2, rng).matrix()).trace()) < 1e-10);
    // Excited population decays as e^{-t}.
    const Density rho = evolve(g, diag_density({0.0, 1.0}), 0.7);
    CHECK(rho.matrix()(1, 1).real() == doctest::Approx(std::exp(-0.7)).epsilon(1e-12));
  }

  TEST_CASE("Schur dephasing qubit against direct exponentiation") {
    const Generator g = dephasing_qubit();
    Rng rng(2);
    const Density rho = random_hs_density(2, rng);
    const double t = 0.9;
    const Density out = evolve(g, rho, t);
    CHECK(std::abs(out.matrix()(0, 0) - rho.matrix()(0, 0)) < 1e-12);
    CHECK(std::abs(out.matrix()(1, 1) - rho.matrix()(1, 1)) < 1e-12);
    CHECK(std::abs(out.matrix()(0, 1) - std::exp(-t) * rho.matrix()(0, 1)) < 1e-12);
  }

  TEST_CASE("invalid generators are rejected") {
    Eigen::MatrixXd neg(2, 2);
    neg << 0, -1, -1, 0;
    CHECK_THROWS_AS(build_generator(SchurSpec{neg}), InputError);
    Eigen::MatrixXd diag(2, 2);
    diag << 1, 1, 1, 0;
    CHECK_THROWS_AS(build_generator(SchurSpec{diag}), InputError);
    // exp(-t psi) not PSD: psi is not conditionally negative definite.
    Eigen::MatrixXd cnd(3, 3);
    cnd << 0, 9, 1, 9, 0, 1, 1, 1, 0;
    CHECK_THROWS_AS(build_generator(SchurSpec{cnd}), InputError);

    // L = id - transpose: exp(-tL) = e^{-t} id + (1 - e^{-t}) T on the symmetric part; not CP.
    const SuperOperator transpose = SuperOperator::from_map(2, [](const Matrix& x) { return Matrix(x.transpose()); });
    CHECK(min_eig(choi_matrix(transpose)) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(build_generator(RawSpec{SuperOperator::identity(2) - transpose}), InputError);
    // Not unital.
    CHECK_THROWS_AS(build_generator(RawSpec{SuperOperator::identity(2)}), InputError);
  }

  TEST_CASE("evolve examples") {
    const Generator g = build_generator(depolarizing_spec(3, 1.0));
    Rng rng(3);
    const Density rho = random_hs_density(3, rng).scaled(2.0);
    CHECK(max_abs(evolve(g, rho, 0.0).matrix() - rho.matrix()) == 0.0);
    for (double t : {0.1, 1.0, 3.0}) {
      const Matrix oracle = std::exp(-t) * rho.matrix() + (1 - std::exp(-t)) * rho.trace() * Matrix::Identity(3, 3) / 3.0;
      CHECK(max_abs(evolve(g, rho, t).matrix() - oracle) < 1e-12);
    }
    const Density s = Density::maximally_mixed(3);
    CHECK(max_abs(evolve(g, s, 5.0).matrix() - s.matrix()) < 1e-12);
    CHECK_THROWS_AS(evolve(g, rho, -1.0), InputError);
  }

  TEST_CASE("semigroup law, trace preservation and order preservation") {
    Rng rng(4);
    set_log_level(LogLevel::silent);
    for (int k = 0; k < 10; ++k) {
      const Eigen::Index d = 2 + k % 3;
      const Generator g = random_faithful_gkls(d, rng);
      const Density sigma = *invariant_states(g).faithful_state;
      const Density rho = random_state_in_balpha(sigma, 4.0, rng);
      const double s = 0.01 + 1.99 * rng.uniform(), t = 0.01 + 1.99 * rng.uniform();
      const Density a = evolve(g, evolve(g, rho, s), t), b = evolve(g, rho, s + t);
      CHECK(max_abs(a.matrix() - b.matrix()) < 1e-9);
      CHECK(std::abs(b.trace() - rho.trace()) < 1e-10);
      const double alpha0 = *balpha_factor(rho, sigma);
      const SandwichBound sb = sandwich_check(b, sigma, alpha0 + 1e-8);
      CHECK(sb.lower_ok);
      CHECK(sb.upper_ok);
    }
    set_log_level(LogLevel::warning);
  }

  TEST_CASE("invariant states") {
    const InvariantStates dep = invariant_states(build_generator(depolarizing_spec(3)));
    CHECK(dep.basis.size() == 1);
    REQUIRE(dep.has_faithful);
    CHECK(max_abs(dep.faithful_state->matrix() - Matrix::Identity(3, 3) / 3.0) < 1e-10);

    const InvariantStates blocks = invariant_states(build_generator(block_depolarizing_spec({2, 2})));
    CHECK(blocks.basis.size() == 2);
    CHECK(blocks.has_faithful);

    Eigen::MatrixXd s = Eigen::MatrixXd::Ones(3, 3) - Eigen::MatrixXd::Identity(3, 3);
    const InvariantStates schur = invariant_states(build_generator(SchurSpec{s}));
    CHECK(schur.basis.size() == 3);
    for (const auto& b : schur.basis) CHECK(max_abs(b.matrix() - Matrix(b.matrix().diagonal().asDiagonal())) < 1e-10);

    const InvariantStates ad = invariant_states(build_generator(amplitude_damping_spec()));
    CHECK(ad.basis.size() == 1);
    CHECK_FALSE(ad.has_faithful);
  }

  TEST_CASE("fixed-point expectation examples") {
    const Generator dep = build_generator(depolarizing_spec(2));
    const Density mm = Density::maximally_mixed(2);
    const FixedPointData fp = fixed_point_expectation(dep, mm);
    CHECK(fp.gns_projection);
    Rng rng(5);
    const Matrix x = random_ginibre(2, rng);
    CHECK(max_abs(fp.expectation.apply(x) - (x.trace() / 2.0) * Matrix::Identity(2, 2)) < 1e-10);
    CHECK(max_abs(fp.expectation_star.apply(x) - (x.trace() / 2.0) * Matrix::Identity(2, 2)) < 1e-10);

    Eigen::MatrixXd s(3, 3);
    s << 0, 1, 2, 1, 0, 1, 2, 1, 0;
    const Generator schur = build_generator(SchurSpec{s});
    const Density phi = diag_density({0.2, 0.3, 0.5});
    const FixedPointData fs = fixed_point_expectation(schur, phi);
    const Matrix y = random_ginibre(3, rng);
    CHECK(max_abs(fs.expectation.apply(y) - Matrix(y.diagonal().asDiagonal())) < 1e-10);
    CHECK(fs.fixed_basis.size() == 3);
  }

  TEST_CASE("fixed-point expectation invariants on random generators, both routes") {
    Rng rng(6);
    for (int k = 0; k < 6; ++k) {
      const Eigen::Index d = 2 + k % 3;
      const Generator g = random_faithful_gkls(d, rng);
      const Density phi = *invariant_states(g).faithful_state;
      for (const FixedPointData& fp : {fixed_point_expectation(g, phi), fixed_point_expectation_cesaro(g, phi)}) {
        const Matrix& e = fp.expectation.matrix();
        CHECK(max_abs(e * e - e) < 1e-9);
        CHECK(max_abs(fp.expectation.apply(Matrix::Identity(d, d)) - Matrix::Identity(d, d)) < 1e-9);
        CHECK(min_eig(choi_matrix(fp.expectation)) > -1e-9);
        for (double t : {0.5, 2.0}) {
          const Matrix p = g.heisenberg_propagator(t).matrix();
          CHECK(max_abs(e * p - e) < 1e-9);
          CHECK(max_abs(p * e - e) < 1e-9);
        }
        const Density rho = random_state_in_balpha(phi, 3.0, rng);
        const Matrix er = fp.expectation_star.apply(rho.matrix());
        CHECK(max_abs(fp.expectation_star.apply(evolve(g, rho, 0.8).matrix()) - er) < 1e-9);
      }
    }
  }

  TEST_CASE("block generator: E* preserves block weights") {
    const Generator g = build_generator(block_depolarizing_spec({2, 1}));
    const Density phi = diag_density({0.25, 0.25, 0.5});
    const FixedPointData fp = fixed_point_expectation(g, phi);
    Rng rng(7);
    const Density rho = random_hs_density(3, rng);
    const Matrix er = fp.expectation_star.apply(rho.matrix());
    const double w = (rho.matrix()(0, 0) + rho.matrix()(1, 1)).real();
    CHECK(std::abs(er(0, 0).real() - w / 2) < 1e-10);
    CHECK(std::abs(er(2, 2).real() - rho.matrix()(2, 2).real()) < 1e-10);
    CHECK(std::abs(er(0, 2)) < 1e-10);
  }

  TEST_CASE("GNS symmetry residual") {
    CHECK(gns_symmetry_residual(build_generator(depolarizing_spec(3)), Density::maximally_mixed(3)) < 1e-10);
    Rng rng(8);
    Eigen::MatrixXd s(3, 3);
    s << 0, 1, 2, 1, 0, 1, 2, 1, 0;
    const Generator schur = build_generator(SchurSpec{s});
    for (int k = 0; k < 5; ++k) CHECK(gns_symmetry_residual(schur, random_dirichlet_diagonal(3, rng)) < 1e-10);
    CHECK(gns_symmetry_residual(build_generator(amplitude_damping_spec()), Density::maximally_mixed(2)) > 0.01);
  }

  TEST_CASE("GNS-symmetric generator is self-adjoint for the weighted inner product") {
    Eigen::MatrixXd s(3, 3);
    s << 0, 1, 2, 1, 0, 1, 2, 1, 0;
    const Generator g = build_generator(SchurSpec{s});
    const Density phi = diag_density({0.2, 0.3, 0.5});
    const Matrix w = gns_weight(phi);
    const Matrix l = g.heisenberg().matrix();
    // <x, L y>_phi = tr(phi x^H L y) = vec(x)^H W vec(L y).
    CHECK(max_abs(w * l - (w * l).adjoint()) < 1e-9);
  }

  TEST_CASE("modular flow") {
    Rng rng(9);
    const Matrix x = random_ginibre(3, rng);
    CHECK(max_abs(modular_flow(Density::maximally_mixed(3), 0.7, x) - x) < 1e-12);
    const Density phi = diag_density({0.2, 0.3, 0.5});
    const Matrix e = matrix_unit(3, 0, 2);
    const cplx phase = std::exp(cplx(0, 0.7 * (std::log(0.2) - std::log(0.5))));
    CHECK(max_abs(modular_flow(phi, 0.7, e) - phase * e) < 1e-12);
    const Density r = random_faithful_density(3, rng);
    CHECK(max_abs(modular_flow(r, -1.3, modular_flow(r, 1.3, x)) - x) < 1e-10);
    CHECK_THROWS_AS(modular_flow(diag_density({1.0, 0.0}), 1.0, Matrix::Identity(2, 2)), DomainError);
  }

  TEST_CASE("spectral gap") {
    CHECK(spectral_gap(build_generator(depolarizing_spec(2)), Density::maximally_mixed(2)) == doctest::Approx(1.0));
    Eigen::MatrixXd s(3, 3);
    s << 0, 1.5, 2, 1.5, 0, 0.7, 2, 0.7, 0;
    const Generator g = build_generator(SchurSpec{s});
    CHECK(spectral_gap(g, diag_density({0.2, 0.3, 0.5})) == doctest::Approx(0.7));
    const Generator blocks = build_generator(block_depolarizing_spec({2, 2}, 1.0));
    CHECK(spectral_gap(blocks, Density::maximally_mixed(4)) == doctest::Approx(1.0));
    CHECK_THROWS_AS(spectral_gap(build_generator(amplitude_damping_spec()), Density::maximally_mixed(2)), DomainError);
  }

  TEST_CASE("long-time convergence to E* for GNS-symmetric generators") {
    Eigen::MatrixXd s(3, 3);
    s << 0, 1, 2, 1, 0, 1, 2, 1, 0;
    const Generator g = build_generator(SchurSpec{s});
    const Density phi = diag_density({0.2, 0.3, 0.5});
    const FixedPointData fp = fixed_point_expectation(g, phi);
    const double gap = spectral_gap(g, phi);
    Rng rng(10);
    const Density rho = random_hs_density(3, rng);
    const HermitianOperator diff = evolve(g, rho, 50.0 / gap).op() - fp.expectation_star.apply(rho.op());
    CHECK(trace_norm(diff) <= 1e-6);
  }
}
