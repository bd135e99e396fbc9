#pragma once

#include <optional>
#include <vector>

#include "entroflow/matcore.hpp"
#include "entroflow/qms.hpp"
#include "entroflow/statespace.hpp"

namespace entroflow {

/// N = { U B U^H : B block-diagonal for `blocks` }, U = identity when absent.
struct SubalgebraSpec {
  Eigen::Index dim = 0;
  std::vector<std::vector<Eigen::Index>> blocks;
  std::optional<Matrix> unitary;

  /// Throws InputError unless blocks partition {0..dim-1} and U is unitary.
  void validate() const;
  Matrix basis() const;
  /// Whether this algebra is contained in `larger` (same basis, coarser blocks there).
  bool contained_in(const SubalgebraSpec& larger) const;
};

/// Trace-preserving pinching onto N. With phi supplied, phi must lie in N,
/// in which case the pinching is the unique phi-preserving expectation.
SuperOperator conditional_expectation(const SubalgebraSpec& spec, const std::optional<Density>& phi = std::nullopt);

/// A state on N as one matrix per block, in the block basis.
using BlockState = std::vector<Matrix>;

/// The density of psi o E on the full algebra.
Density embed(const SubalgebraSpec& spec, const BlockState& state);

struct ExtensionEntropies {
  double extended = 0.0;  // D(psi o E || phi o E) on the full algebra
  double restricted = 0.0;  // D(psi || phi) computed block by block on N
};

ExtensionEntropies entropy_extension_check(const SubalgebraSpec& spec, const BlockState& psi, const BlockState& phi);

/// |E(log h_{psi o E} - log h_{phi o E}) - (log h_psi - log h_phi)|_F
double rel_hamiltonian_projection_check(const SubalgebraSpec& spec, const BlockState& psi, const BlockState& phi);

/// D(psi|N_n || phi|N_n) along an increasing chain ending at the full algebra.
std::vector<double> martingale_entropy_check(const std::vector<SubalgebraSpec>& chain, const Density& psi,
                                             const Density& phi);

/// |D(psi_n || E* psi) - D(psi_n || E* psi_n) - D(E* psi_n || E* psi)| with E
/// the fixed-point expectation of gen relative to phi.
double chain_rule_check(const Generator& gen, const Density& phi, const Density& psi, const Density& psi_n);

}  // namespace entroflow
