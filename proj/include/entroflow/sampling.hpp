#pragma once

#include <cstdint>
#include <vector>

#include "entroflow/matcore.hpp"
#include "entroflow/qms.hpp"
#include "entroflow/random.hpp"
#include "entroflow/statespace.hpp"

namespace entroflow {

Matrix random_ginibre(Eigen::Index dim, Rng& rng);
Matrix random_unitary(Eigen::Index dim, Rng& rng);
HermitianOperator random_hermitian(Eigen::Index dim, Rng& rng);

/// Hilbert-Schmidt random density matrix (normalized).
Density random_hs_density(Eigen::Index dim, Rng& rng);
Density random_pure_state(Eigen::Index dim, Rng& rng);
/// Diagonal density with Dirichlet(1, ..., 1) spectrum.
Density random_dirichlet_diagonal(Eigen::Index dim, Rng& rng);
/// (1 - floor) * HS-random + floor * 1/d.
Density random_faithful_density(Eigen::Index dim, Rng& rng, double floor = 0.3);
/// A normalized state with balpha_factor(rho, sigma) <= alpha.
Density random_state_in_balpha(const Density& sigma, double alpha, Rng& rng);

/// Random CPTP map with `kraus` Kraus operators, Schroedinger picture.
SuperOperator random_channel(Eigen::Index dim, int kraus, Rng& rng);
/// Random GKLS generator with `jumps` Gaussian jump operators.
GklsSpec random_gkls_spec(Eigen::Index dim, int jumps, Rng& rng, double hamiltonian_scale = 0.5);

/// State family for entropy-decay estimators. Every sample lies in B(phi):
///   - HS-random states blended with phi, (1-e) omega + e phi, e from blend_epsilons;
///   - near-pure states (1 - 1/alpha) |v><v| + phi/alpha;
///   - diagonal Dirichlet-random states blended with phi at the smallest epsilon.
struct SamplerConfig {
  int count = 100;
  std::vector<double> blend_epsilons{0.01, 0.1};
  double near_pure_fraction = 0.2;
  double dirichlet_fraction = 0.2;
  double near_pure_alpha = 1e3;
};

/// Sample k is drawn from Rng(seed, k) alone.
Density sample_state(const Density& phi, const SamplerConfig& cfg, std::uint64_t seed, int index);
std::vector<Density> sample_states(const Density& phi, const SamplerConfig& cfg, std::uint64_t seed);

}  // namespace entroflow
