#pragma once

#include <optional>
#include <string>

#include "entroflow/matcore.hpp"

namespace entroflow {

/// A value in [-inf, +inf] where only +inf is representable as non-finite.
/// Relative entropy genuinely takes the value +inf on support mismatch.
class ExtendedReal {
 public:
  constexpr ExtendedReal(double v) : value_(v), infinite_(false) {}  // NOLINT: implicit by design of the API
  static constexpr ExtendedReal infinity() { return ExtendedReal(); }

  constexpr bool is_finite() const { return !infinite_; }
  constexpr bool is_infinite() const { return infinite_; }
  /// Throws DomainError when infinite.
  double value() const;
  std::string to_string() const;

 private:
  constexpr ExtendedReal() : value_(0.0), infinite_(true) {}
  double value_;
  bool infinite_;
};

/// Positive semidefinite operator with cached trace. Not normalized
/// automatically: positive functionals of any mass are allowed.
class Density {
 public:
  Density() = default;
  /// Throws NotPsdError if min eigenvalue < -1e-10 * lambda_max.
  explicit Density(HermitianOperator op);
  explicit Density(const Matrix& m) : Density(HermitianOperator(m)) {}

  static Density maximally_mixed(Eigen::Index dim);

  const HermitianOperator& op() const { return op_; }
  const Matrix& matrix() const { return op_.matrix(); }
  Eigen::Index dim() const { return op_.dim(); }
  double trace() const { return trace_; }

  Density normalized() const;
  Density scaled(double c) const;
  bool is_faithful(double support_cutoff = kSupportCutoff) const;

 private:
  HermitianOperator op_;
  double trace_ = 0.0;
};

/// Witness for rho in B_alpha(sigma): alpha^{-1} sigma <= rho <= alpha sigma.
struct SandwichBound {
  double alpha = 1.0;
  bool lower_ok = false;
  bool upper_ok = false;
  double witness_eigs[2] = {0.0, 0.0};  // min_eig(rho - sigma/alpha), min_eig(alpha sigma - rho)
};

SandwichBound sandwich_check(const Density& rho, const Density& sigma, double alpha, double tol = 1e-10);

/// Umegaki relative entropy tr rho (log rho - log sigma), +inf unless
/// supp(rho) <= supp(sigma). Computed from the overlaps of the two eigenbases.
ExtendedReal rel_entropy(const Density& rho, const Density& sigma);

/// log rho - log sigma for faithful rho, sigma.
HermitianOperator rel_hamiltonian(const Density& rho, const Density& sigma);
/// log rho - log sigma on a common support projection on which both are faithful.
HermitianOperator rel_hamiltonian(const Density& rho, const Density& sigma, const HermitianOperator& support);

struct RelHamiltonianBound {
  double norm = 0.0;       // operator norm of log rho - log sigma
  double log_alpha = 0.0;  // log of balpha_factor
  bool ok = false;         // norm <= log_alpha + 1e-9
};

/// Checks |log rho - log sigma| <= log alpha for rho in B_alpha(sigma).
RelHamiltonianBound check_rel_hamiltonian_bound(const Density& rho, const Density& sigma);

/// Minimal alpha >= 1 with rho in B_alpha(sigma); nullopt when rho is singular.
std::optional<double> balpha_factor(const Density& rho, const Density& sigma);

/// Integral of (sigma + l)^{-1} - (rho + l)^{-1} over l in [1/n, n], by
/// Gauss-Legendre quadrature in u = log l with `nodes` points.
HermitianOperator resolvent_log_approx(const Density& rho, const Density& sigma, int n, int nodes = 200);

/// 2 D(rho||sigma) - |rho - sigma|_1^2 for normalized states (+inf on support mismatch).
double pinsker_gap(const Density& rho, const Density& sigma);

}  // namespace entroflow
