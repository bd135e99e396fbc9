#include "entroflow/statespace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include <gsl/gsl_integration.h>

#include "entroflow/errors.hpp"

namespace entroflow {

double ExtendedReal::value() const {
  if (infinite_) throw DomainError("relative entropy is +inf");
  return value_;
}

std::string ExtendedReal::to_string() const { return infinite_ ? "inf" : std::to_string(value_); }

Density::Density(HermitianOperator op) : op_(std::move(op)) {
  const auto sd = herm_eig(op_);
  const Eigen::Index n = sd.eigenvalues.size();
  if (n == 0) throw InputError("Density: empty operator");
  const double lmax = sd.eigenvalues(n - 1);
  const double lmin = sd.eigenvalues(0);
  if (lmin < -1e-10 * std::max(lmax, 0.0) || (lmax <= 0.0 && lmin < 0.0))
    throw NotPsdError("Density: operator is not positive semidefinite (min eigenvalue " + std::to_string(lmin) + ")");
  trace_ = op_.trace();
}

Density Density::maximally_mixed(Eigen::Index dim) {
  return Density(HermitianOperator::identity(dim) * (1.0 / static_cast<double>(dim)));
}

Density Density::normalized() const {
  if (trace_ <= 0.0) throw DomainError("Density::normalized: zero trace");
  return Density(op_ * (1.0 / trace_));
}

Density Density::scaled(double c) const {
  if (!(c >= 0.0)) throw InputError("Density::scaled: negative factor");
  return Density(op_ * c);
}

bool Density::is_faithful(double support_cutoff) const {
  const auto sd = herm_eig(op_);
  const double lmax = sd.eigenvalues(sd.eigenvalues.size() - 1);
  return lmax > 0.0 && sd.eigenvalues(0) >= support_cutoff * lmax;
}

SandwichBound sandwich_check(const Density& rho, const Density& sigma, double alpha, double tol) {
  if (!(alpha >= 1.0)) throw InputError("sandwich_check: alpha must be >= 1");
  SandwichBound b;
  b.alpha = alpha;
  b.witness_eigs[0] = min_eig(rho.op() - sigma.op() * (1.0 / alpha));
  b.witness_eigs[1] = min_eig(sigma.op() * alpha - rho.op());
  b.lower_ok = b.witness_eigs[0] >= -tol;
  b.upper_ok = b.witness_eigs[1] >= -tol;
  return b;
}

ExtendedReal rel_entropy(const Density& rho, const Density& sigma) {
  if (rho.dim() != sigma.dim()) throw InputError("rel_entropy: dimension mismatch");
  const auto er = herm_eig(rho.op());
  const auto es = herm_eig(sigma.op());
  const Eigen::Index n = rho.dim();
  const double pmax = er.eigenvalues(n - 1);
  const double qmax = es.eigenvalues(n - 1);
  if (pmax <= 0.0) return 0.0;
  if (qmax <= 0.0) return ExtendedReal::infinity();

  const Eigen::MatrixXd overlap = (er.eigenvectors.adjoint() * es.eigenvectors).cwiseAbs2();
  double leak = 0.0;
  double d = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double p = er.eigenvalues(i);
    if (p < kSupportCutoff * pmax) continue;
    d += p * std::log(p);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double q = es.eigenvalues(j);
      if (q < kSupportCutoff * qmax)
        leak += p * overlap(i, j);
      else
        d -= p * overlap(i, j) * std::log(q);
    }
  }
  if (leak > 1e-10 * rho.trace()) return ExtendedReal::infinity();
  return d;
}

HermitianOperator rel_hamiltonian(const Density& rho, const Density& sigma) {
  if (rho.dim() != sigma.dim()) throw InputError("rel_hamiltonian: dimension mismatch");
  if (!rho.is_faithful() || !sigma.is_faithful())
    throw DomainError("rel_hamiltonian: singular argument without a common support");
  return mat_log(rho.op()) - mat_log(sigma.op());
}

HermitianOperator rel_hamiltonian(const Density& rho, const Density& sigma, const HermitianOperator& support) {
  if (rho.dim() != sigma.dim() || rho.dim() != support.dim())
    throw InputError("rel_hamiltonian: dimension mismatch");
  const HermitianOperator pr = support_projection(rho.op());
  const HermitianOperator ps = support_projection(sigma.op());
  const double tol = 1e-8 * std::sqrt(static_cast<double>(rho.dim()));
  if ((pr.matrix() - support.matrix()).norm() > tol || (ps.matrix() - support.matrix()).norm() > tol)
    throw DomainError("rel_hamiltonian: arguments are not faithful on the supplied support");
  return mat_log(rho.op()) - mat_log(sigma.op());
}

std::optional<double> balpha_factor(const Density& rho, const Density& sigma) {
  if (rho.dim() != sigma.dim()) throw InputError("balpha_factor: dimension mismatch");
  if (!sigma.is_faithful()) throw InputError("balpha_factor: reference state is singular");
  if (!rho.is_faithful()) return std::nullopt;
  auto inv_sqrt = [](double x) { return 1.0 / std::sqrt(x); };
  const Matrix si = mat_fn(sigma.op(), inv_sqrt).matrix();
  const Matrix ri = mat_fn(rho.op(), inv_sqrt).matrix();
  const double up = max_eig(HermitianOperator(si * rho.matrix() * si));
  const double down = max_eig(HermitianOperator(ri * sigma.matrix() * ri));
  return std::max({up, down, 1.0});
}

RelHamiltonianBound check_rel_hamiltonian_bound(const Density& rho, const Density& sigma) {
  RelHamiltonianBound b;
  const auto alpha = balpha_factor(rho, sigma);
  if (!alpha) throw DomainError("check_rel_hamiltonian_bound: rho is not in B(sigma)");
  b.norm = operator_norm(rel_hamiltonian(rho, sigma));
  b.log_alpha = std::log(*alpha);
  b.ok = b.norm <= b.log_alpha + 1e-9;
  return b;
}

HermitianOperator resolvent_log_approx(const Density& rho, const Density& sigma, int n, int nodes) {
  if (n < 1) throw InputError("resolvent_log_approx: n must be >= 1");
  if (nodes < 1) throw InputError("resolvent_log_approx: need at least one node");
  if (rho.dim() != sigma.dim()) throw InputError("resolvent_log_approx: dimension mismatch");
  if (!rho.is_faithful() || !sigma.is_faithful()) throw DomainError("resolvent_log_approx: singular argument");

  std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)> table(
      gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(nodes)), &gsl_integration_glfixed_table_free);
  if (!table) throw NumericalError("resolvent_log_approx: could not allocate quadrature table");
  const double a = -std::log(static_cast<double>(n));
  const double b = -a;
  std::vector<double> us(static_cast<std::size_t>(nodes)), ws(static_cast<std::size_t>(nodes));
  for (int k = 0; k < nodes; ++k)
    gsl_integration_glfixed_point(a, b, static_cast<std::size_t>(k), &us[k], &ws[k], table.get());

  // The integrand is a function of one operator at a time, so the operator
  // integral is the spectral lift of the scalar integral of e^u / (x + e^u).
  auto lifted = [&](const Density& s) {
    const auto sd = herm_eig(s.op());
    RealVector f = RealVector::Zero(sd.eigenvalues.size());
    for (Eigen::Index i = 0; i < f.size(); ++i) {
      const double x = sd.eigenvalues(i);
      for (int k = 0; k < nodes; ++k) {
        const double l = std::exp(us[k]);
        f(i) += ws[k] * l / (x + l);
      }
    }
    return HermitianOperator(sd.eigenvectors * f.cast<cplx>().asDiagonal() * sd.eigenvectors.adjoint());
  };
  return lifted(sigma) - lifted(rho);
}

double pinsker_gap(const Density& rho, const Density& sigma) {
  if (std::abs(rho.trace() - 1.0) > 1e-10 || std::abs(sigma.trace() - 1.0) > 1e-10)
    throw InputError("pinsker_gap: states must be normalized");
  const ExtendedReal d = rel_entropy(rho, sigma);
  if (d.is_infinite()) return std::numeric_limits<double>::infinity();
  const double tn = trace_norm(rho.op() - sigma.op());
  return 2.0 * d.value() - tn * tn;
}

}  // namespace entroflow
