#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "entroflow/matcore.hpp"
#include "entroflow/statespace.hpp"

namespace entroflow {

// Sign convention throughout: L is the positive generator, P_t = exp(-t L)
// in the Heisenberg picture and d/dt P_t*(rho) = -L*(P_t*(rho)).

/// GKLS data: L(x) = -i[H, x] - sum_k (J_k^H x J_k - {J_k^H J_k, x}/2).
struct GklsSpec {
  HermitianOperator hamiltonian;
  std::vector<Matrix> jumps;
};

/// Schur multiplier: L(x)_gh = symbol(g, h) x_gh with a real symmetric,
/// non-negative, zero-diagonal symbol.
struct SchurSpec {
  Eigen::MatrixXd symbol;
};

/// Heisenberg generator L given directly.
struct RawSpec {
  SuperOperator heisenberg;
};

using GeneratorSpec = std::variant<GklsSpec, SchurSpec, RawSpec>;

class Generator {
 public:
  enum class Kind { gkls, schur, raw };

  Eigen::Index dim() const { return dim_; }
  Kind kind() const { return kind_; }
  std::string kind_name() const;
  const GeneratorSpec& spec() const { return spec_; }

  /// L (Heisenberg picture).
  const SuperOperator& heisenberg() const { return heisenberg_; }
  /// L* (Schroedinger picture), the trace dual of L.
  const SuperOperator& schrodinger() const { return schrodinger_; }

  /// P_t = exp(-t L).
  SuperOperator heisenberg_propagator(double t) const;
  /// P_t* = exp(-t L*).
  SuperOperator schrodinger_propagator(double t) const;
  /// P_t*(x) without forming the propagator when the spectral cache exists.
  Matrix propagate_state(const Matrix& x, double t) const;

  friend Generator build_generator(GeneratorSpec spec);

 private:
  struct SpectralCache {
    Matrix vectors;  // unitary, columns diagonalize L*
    Vector values;   // eigenvalues of L*
  };

  Eigen::Index dim_ = 0;
  Kind kind_ = Kind::raw;
  GeneratorSpec spec_;
  SuperOperator heisenberg_;
  SuperOperator schrodinger_;
  std::shared_ptr<const SpectralCache> cache_;  // set iff L* is normal
};

/// Builds L and L*, then checks L(1) = 0, tr L*(A) = 0 and complete
/// positivity of exp(-t L) at t in {0.1, 1}. Throws InputError on failure.
Generator build_generator(GeneratorSpec spec);

// Standard generators.
GklsSpec depolarizing_spec(Eigen::Index dim, double rate = 1.0);
/// Depolarizing inside each block of consecutive indices; off-block terms decay.
GklsSpec block_depolarizing_spec(const std::vector<Eigen::Index>& block_sizes, double rate = 1.0);
GklsSpec amplitude_damping_spec(double rate = 1.0);

/// P_t*(rho). Trace is preserved; eigenvalues in [-1e-9, -1e-10 lambda_max)
/// are clamped to zero with a logged warning, anything lower throws.
Density evolve(const Generator& gen, const Density& rho, double t);

struct InvariantStates {
  std::vector<HermitianOperator> basis;  // HS-orthonormal basis of ker L* among Hermitian operators
  bool has_faithful = false;
  std::optional<Density> faithful_state;  // normalized, when has_faithful
};

InvariantStates invariant_states(const Generator& gen);

struct FixedPointData {
  SuperOperator expectation;        // E, Heisenberg picture
  SuperOperator expectation_star;   // E*, trace dual of E
  std::vector<Matrix> fixed_basis;  // HS-orthonormal Hermitian basis of ker L
  bool gns_projection = false;      // true when built as the GNS-orthogonal kernel projection
};

/// Conditional expectation onto the fixed-point algebra. Uses the projection
/// onto ker L orthogonal for <x, y> = tr(phi^{1/2} x^H phi^{1/2} y) when gen is
/// GNS-symmetric w.r.t. phi, otherwise the spectral (Riesz) projection onto
/// ker L along ran L, which is the Cesaro limit of P_t.
FixedPointData fixed_point_expectation(const Generator& gen, const Density& phi);
/// Same, forcing the Riesz-projection route.
FixedPointData fixed_point_expectation_cesaro(const Generator& gen, const Density& phi);

/// max over matrix units x, y and t in {0.3, 1} of
/// |tr(phi P_t(x)^H y) - tr(phi x^H P_t(y))|.
double gns_symmetry_residual(const Generator& gen, const Density& phi);

/// phi^{it} x phi^{-it}.
Matrix modular_flow(const Density& phi, double t, const Matrix& x);

/// Smallest nonzero eigenvalue of L as a self-adjoint operator for the
/// phi-weighted inner product tr(phi x^H y). Requires GNS symmetry (1e-8).
double spectral_gap(const Generator& gen, const Density& phi);

/// Superoperator matrix of X -> X phi, the Gram matrix of tr(phi x^H y).
Matrix gns_weight(const Density& phi);

/// Orthonormal (HS) basis of Hermitian d x d matrices: E_gg, symmetric and
/// antisymmetric off-diagonal combinations.
std::vector<Matrix> hermitian_basis(Eigen::Index dim);

}  // namespace entroflow
