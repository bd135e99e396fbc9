#include "entroflow/subalg.hpp"

#include <algorithm>
#include <cmath>

#include "entroflow/errors.hpp"

namespace entroflow {

namespace {

double finite_entropy(const Density& a, const Density& b, const char* what) {
  const ExtendedReal d = rel_entropy(a, b);
  if (d.is_infinite()) throw DomainError(std::string(what) + ": support violation (infinite relative entropy)");
  return d.value();
}

void check_block_state(const SubalgebraSpec& spec, const BlockState& s) {
  if (s.size() != spec.blocks.size()) throw InputError("block state: wrong number of blocks");
  for (std::size_t k = 0; k < s.size(); ++k) {
    const auto n = static_cast<Eigen::Index>(spec.blocks[k].size());
    if (s[k].rows() != n || s[k].cols() != n) throw InputError("block state: block has the wrong size");
  }
}

Matrix block_diagonal(const SubalgebraSpec& spec, const std::vector<Matrix>& blocks) {
  Matrix m = Matrix::Zero(spec.dim, spec.dim);
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const auto& idx = spec.blocks[k];
    for (std::size_t r = 0; r < idx.size(); ++r)
      for (std::size_t c = 0; c < idx.size(); ++c)
        m(idx[r], idx[c]) = blocks[k](static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }
  const Matrix u = spec.basis();
  return u * m * u.adjoint();
}

}  // namespace

void SubalgebraSpec::validate() const {
  if (dim < 1) throw InputError("subalgebra: dimension must be positive");
  std::vector<int> seen(static_cast<std::size_t>(dim), 0);
  for (const auto& b : blocks) {
    if (b.empty()) throw InputError("subalgebra: empty block");
    for (Eigen::Index i : b) {
      if (i < 0 || i >= dim) throw InputError("subalgebra: block index out of range");
      if (seen[static_cast<std::size_t>(i)]++) throw InputError("subalgebra: blocks overlap");
    }
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) throw InputError("subalgebra: blocks do not cover the index set");
  if (unitary) {
    if (unitary->rows() != dim || unitary->cols() != dim) throw InputError("subalgebra: unitary has the wrong size");
    if ((*unitary * unitary->adjoint() - Matrix::Identity(dim, dim)).norm() > 1e-12)
      throw InputError("subalgebra: basis change is not unitary");
  }
}

Matrix SubalgebraSpec::basis() const { return unitary ? *unitary : Matrix::Identity(dim, dim); }

bool SubalgebraSpec::contained_in(const SubalgebraSpec& larger) const {
  if (dim != larger.dim) return false;
  if ((basis() - larger.basis()).norm() > 1e-12) return false;
  std::vector<std::size_t> owner(static_cast<std::size_t>(dim));
  for (std::size_t k = 0; k < larger.blocks.size(); ++k)
    for (Eigen::Index i : larger.blocks[k]) owner[static_cast<std::size_t>(i)] = k;
  for (const auto& b : blocks)
    for (Eigen::Index i : b)
      if (owner[static_cast<std::size_t>(i)] != owner[static_cast<std::size_t>(b.front())]) return false;
  return true;
}

SuperOperator conditional_expectation(const SubalgebraSpec& spec, const std::optional<Density>& phi) {
  spec.validate();
  const Eigen::Index d = spec.dim;
  const Matrix u = spec.basis();
  std::vector<Matrix> projectors;
  for (const auto& b : spec.blocks) {
    Matrix p = Matrix::Zero(d, d);
    for (Eigen::Index i : b) p(i, i) = 1.0;
    projectors.push_back(u * p * u.adjoint());
  }
  SuperOperator e = SuperOperator::zero(d);
  for (const Matrix& p : projectors) e = e + SuperOperator::sandwich(p, p);
  if (phi) {
    if (phi->dim() != d) throw InputError("conditional_expectation: reference state has the wrong dimension");
    const Matrix pinched = e.apply(phi->matrix());
    if ((pinched - phi->matrix()).norm() > 1e-10 * std::max(1.0, phi->matrix().norm()))
      throw DomainError("conditional_expectation: no phi-preserving expectation (phi is not block-diagonal)");
  }
  return e;
}

Density embed(const SubalgebraSpec& spec, const BlockState& state) {
  spec.validate();
  check_block_state(spec, state);
  return Density(HermitianOperator(block_diagonal(spec, state)));
}

ExtensionEntropies entropy_extension_check(const SubalgebraSpec& spec, const BlockState& psi, const BlockState& phi) {
  check_block_state(spec, psi);
  check_block_state(spec, phi);
  ExtensionEntropies out;
  out.extended = finite_entropy(embed(spec, psi), embed(spec, phi), "entropy_extension_check");
  for (std::size_t k = 0; k < psi.size(); ++k)
    out.restricted += finite_entropy(Density(psi[k]), Density(phi[k]), "entropy_extension_check");
  return out;
}

double rel_hamiltonian_projection_check(const SubalgebraSpec& spec, const BlockState& psi, const BlockState& phi) {
  check_block_state(spec, psi);
  check_block_state(spec, phi);
  const SuperOperator e = conditional_expectation(spec);
  const HermitianOperator big = rel_hamiltonian(embed(spec, psi), embed(spec, phi));
  std::vector<Matrix> small;
  for (std::size_t k = 0; k < psi.size(); ++k) small.push_back(rel_hamiltonian(Density(psi[k]), Density(phi[k])).matrix());
  return (e.apply(big.matrix()) - block_diagonal(spec, small)).norm();
}

std::vector<double> martingale_entropy_check(const std::vector<SubalgebraSpec>& chain, const Density& psi,
                                             const Density& phi) {
  if (chain.empty()) throw InputError("martingale_entropy_check: empty chain");
  for (const auto& s : chain) {
    s.validate();
    if (s.dim != psi.dim() || s.dim != phi.dim()) throw InputError("martingale_entropy_check: dimension mismatch");
  }
  for (std::size_t n = 0; n + 1 < chain.size(); ++n)
    if (!chain[n].contained_in(chain[n + 1])) throw InputError("martingale_entropy_check: chain is not nested");
  if (chain.back().blocks.size() != 1) throw InputError("martingale_entropy_check: chain must end at the full algebra");
  std::vector<double> out;
  for (const auto& s : chain) {
    const SuperOperator e = conditional_expectation(s);
    out.push_back(finite_entropy(Density(e.apply(psi.op())), Density(e.apply(phi.op())), "martingale_entropy_check"));
  }
  return out;
}

double chain_rule_check(const Generator& gen, const Density& phi, const Density& psi, const Density& psi_n) {
  const FixedPointData fp = fixed_point_expectation(gen, phi);
  const Density e_psi(fp.expectation_star.apply(psi.op()));
  const Density e_psi_n(fp.expectation_star.apply(psi_n.op()));
  const double lhs = finite_entropy(psi_n, e_psi, "chain_rule_check");
  const double a = finite_entropy(psi_n, e_psi_n, "chain_rule_check");
  const double b = finite_entropy(e_psi_n, e_psi, "chain_rule_check");
  return std::abs(lhs - a - b);
}

}  // namespace entroflow
