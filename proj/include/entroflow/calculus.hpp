#pragma once

#include <vector>

#include "entroflow/matcore.hpp"
#include "entroflow/qms.hpp"
#include "entroflow/statespace.hpp"

namespace entroflow {

/// Derivation delta(x) = sum_i [v_i, x] (x) e_i built from commuting diagonal
/// 0/1 projections v_i, with a faithful diagonal reference state.
class DiffCalculus {
 public:
  /// Throws InputError unless every projection is a 0/1 vector of length
  /// phi.dim() and phi commutes with all of them.
  DiffCalculus(std::vector<Eigen::VectorXi> projections, Density phi);

  Eigen::Index dim() const { return phi_.dim(); }
  std::size_t size() const { return projections_.size(); }
  const std::vector<Eigen::VectorXi>& projections() const { return projections_; }
  const Eigen::VectorXi& projection(std::size_t i) const { return projections_.at(i); }
  Matrix projection_matrix(std::size_t i) const;
  const Density& phi() const { return phi_; }

  /// psi(g, h) = sum_i (v_i(g) - v_i(h))^2.
  Eigen::MatrixXd symbol() const;
  /// The Schur-multiplier generator whose quadratic form is dirichlet_energy.
  Generator schur_generator() const;

 private:
  std::vector<Eigen::VectorXi> projections_;
  Density phi_;
};

/// ([v_i, x])_i
std::vector<Matrix> derivation_apply(const DiffCalculus& calc, const Matrix& x);

/// sum_i tr([v_i, a]^H [v_i, a])
double dirichlet_energy(const DiffCalculus& calc, const Matrix& a);

/// T_t^i(y) = e^{-t} y + (1 - e^{-t}) (v y v + (1 - v) y (1 - v)).
SuperOperator single_flip_semigroup(const DiffCalculus& calc, std::size_t i, double t);

/// Pinching onto the commutant of v_i: y -> v y v + (1 - v) y (1 - v).
SuperOperator flip_pinching(const DiffCalculus& calc, std::size_t i);

/// Product of single-flip maps over j != i.
SuperOperator complementary_flip_semigroup(const DiffCalculus& calc, std::size_t i, double t);

struct IntertwineFamily {
  DiffCalculus calc;
  double K = 1.0;
};

/// Component maps T_t^{not i} (T_t^i (1 - E_i) + e^{-2t} E_i), one per projection.
std::vector<SuperOperator> intertwine_operator(const IntertwineFamily& fam, double t);

/// max over matrix units x and components i of
/// |[v_i, P_t(x)] - T_t^i([v_i, x])|_F. Throws DomainError unless gen is the
/// Schur generator induced by the calculus.
double intertwining_residual(const IntertwineFamily& fam, const Generator& gen, double t);

enum class ModuleSide { left, right };

struct CpDominanceResult {
  double min_eigenvalue = 0.0;  // over all components
  std::size_t worst_component = 0;
  std::vector<double> per_component;
  Eigen::Index largest_block = 0;  // side length of the largest diagonalized Choi block
};

/// For each component i, the Choi matrix of
///   x -> e^{-2Kt} pi(P_t(x)) - T_i^H pi(x) T_i
/// (pi = left or right multiplication on the i-th module copy) is assembled
/// and split into its connected diagonal blocks; returns the smallest
/// eigenvalue. Throws SizeError if a block exceeds 4096.
CpDominanceResult cp_dominance_check(const IntertwineFamily& fam, const Generator& gen, double t, ModuleSide side);

/// Same map with the full dense Choi matrix (side dim^3); SizeError above 4096.
CpDominanceResult cp_dominance_check_dense(const IntertwineFamily& fam, const Generator& gen, double t,
                                           ModuleSide side);

inline constexpr Eigen::Index kMaxChoiSide = 4096;

}  // namespace entroflow
