#include "entroflow/qms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unsupported/Eigen/MatrixFunctions>

#include "entroflow/errors.hpp"
#include "entroflow/log.hpp"

namespace entroflow {

namespace {

constexpr cplx kI{0.0, 1.0};

Matrix gkls_heisenberg(const GklsSpec& s) {
  const Eigen::Index d = s.hamiltonian.dim();
  const Matrix& h = s.hamiltonian.matrix();
  Matrix l = -kI * (SuperOperator::left_multiplication(h).matrix() - SuperOperator::right_multiplication(h).matrix());
  for (const Matrix& j : s.jumps) {
    if (j.rows() != d || j.cols() != d) throw InputError("GKLS: jump operator has wrong dimension");
    if (!j.allFinite()) throw InputError("GKLS: non-finite jump operator");
    const Matrix jj = j.adjoint() * j;
    l -= SuperOperator::sandwich(j.adjoint(), j).matrix();
    l += 0.5 * (SuperOperator::left_multiplication(jj).matrix() + SuperOperator::right_multiplication(jj).matrix());
  }
  return l;
}

void validate_symbol(const Eigen::MatrixXd& psi) {
  if (psi.rows() != psi.cols() || psi.rows() == 0) throw InputError("Schur symbol must be a non-empty square matrix");
  if (!psi.allFinite()) throw InputError("Schur symbol has non-finite entries");
  for (Eigen::Index g = 0; g < psi.rows(); ++g) {
    if (psi(g, g) != 0.0) throw InputError("Schur symbol must vanish on the diagonal");
    for (Eigen::Index h = 0; h < psi.cols(); ++h) {
      if (psi(g, h) < 0.0) throw InputError("Schur symbol has negative entries");
      if (std::abs(psi(g, h) - psi(h, g)) > 1e-12 * std::max(1.0, std::abs(psi(g, h))))
        throw InputError("Schur symbol must be symmetric");
    }
  }
  for (double t : {0.1, 1.0}) {
    const Eigen::MatrixXd kernel = (-t * psi).array().exp().matrix();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(kernel, Eigen::EigenvaluesOnly);
    if (es.eigenvalues()(0) < -1e-10)
      throw InputError("Schur symbol is not conditionally negative definite: exp(-t psi) has eigenvalue " +
                       std::to_string(es.eigenvalues()(0)));
  }
}

Matrix schur_heisenberg(const SchurSpec& s) {
  const Eigen::Index d = s.symbol.rows();
  Matrix l = Matrix::Zero(d * d, d * d);
  for (Eigen::Index h = 0; h < d; ++h)
    for (Eigen::Index g = 0; g < d; ++g) l(g + h * d, g + h * d) = s.symbol(g, h);
  return l;
}

double scaled_tol(const Matrix& m, double tol) { return tol * std::max(1.0, m.norm()); }

// Columns spanning the numerical kernel of m. JacobiSVD: Eigen 3.4.0 BDCSVD returns wrong V for exactly repeated zero singular values.
Matrix kernel_columns(const Matrix& m, double rel_tol) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double cut = rel_tol * std::max(1.0, s.size() ? s(0) : 0.0);
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > cut) ++rank;
  return svd.matrixV().rightCols(m.cols() - rank);
}

// Spectral projection onto ker m along ran m (0 must be semisimple).
Matrix riesz_kernel_projection(const Matrix& m) {
  const Matrix k = kernel_columns(m, 1e-9);
  const Matrix w = kernel_columns(m.adjoint(), 1e-9);
  if (k.cols() != w.cols()) throw NumericalError("kernel projection: left and right kernels differ in dimension");
  if (k.cols() == 0) return Matrix::Zero(m.rows(), m.cols());
  const Matrix gram = w.adjoint() * k;
  Eigen::FullPivLU<Matrix> lu(gram);
  if (!lu.isInvertible()) throw NumericalError("kernel projection: eigenvalue 0 is not semisimple");
  return k * lu.solve(w.adjoint());
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

std::vector<Matrix> hermitian_kernel_basis(const Matrix& super, Eigen::Index d) {
  const auto basis = hermitian_basis(d);
  Matrix b(d * d, d * d);
  for (std::size_t k = 0; k < basis.size(); ++k) b.col(static_cast<Eigen::Index>(k)) = vec(basis[k]);
  const Eigen::MatrixXd real = (b.adjoint() * super * b).real();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(real, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double cut = 1e-9 * std::max(1.0, s(0));
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > cut) ++rank;
  std::vector<Matrix> out;
  for (Eigen::Index c = rank; c < real.cols(); ++c) {
    const Vector coeffs = svd.matrixV().col(c).cast<cplx>();
    out.push_back(HermitianOperator(unvec(b * coeffs, d)).matrix());
  }
  return out;
}

void check_fixed_point_data(const Generator& gen, const FixedPointData& fp) {
  const Eigen::Index d = gen.dim();
  const Matrix& e = fp.expectation.matrix();
  const double tol = scaled_tol(e, 1e-9);
  if ((e * e - e).norm() > tol) throw NumericalError("fixed-point expectation is not idempotent");
  if ((fp.expectation.apply(Matrix(Matrix::Identity(d, d))) - Matrix::Identity(d, d)).norm() > tol)
    throw NumericalError("fixed-point expectation is not unital");
  const double ce = min_eig(choi_matrix(fp.expectation));
  if (ce < -1e-9) throw NumericalError("fixed-point expectation is not completely positive (" + std::to_string(ce) + ")");
  for (double t : {0.5, 2.0}) {
    const Matrix p = gen.heisenberg_propagator(t).matrix();
    if ((e * p - e).norm() > tol || (p * e - e).norm() > tol)
      throw NumericalError("fixed-point expectation does not commute with the semigroup");
  }
}

void check_invariant_faithful(const Generator& gen, const Density& phi) {
  if (phi.dim() != gen.dim()) throw InputError("reference state has the wrong dimension");
  if (!phi.is_faithful()) throw DomainError("reference state is not faithful");
  const Matrix lphi = gen.schrodinger().apply(phi.matrix());
  if (lphi.norm() > 1e-9 * std::max(1.0, phi.matrix().norm()))
    throw DomainError("reference state is not invariant: |L*(phi)| = " + std::to_string(lphi.norm()));
}

}  // namespace

std::vector<Matrix> hermitian_basis(Eigen::Index dim) {
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(dim * dim));
  const double r = 1.0 / std::numbers::sqrt2;
  for (Eigen::Index g = 0; g < dim; ++g) out.push_back(matrix_unit(dim, g, g));
  for (Eigen::Index g = 0; g < dim; ++g)
    for (Eigen::Index h = g + 1; h < dim; ++h) {
      out.push_back(r * (matrix_unit(dim, g, h) + matrix_unit(dim, h, g)));
      out.push_back(r * kI * (matrix_unit(dim, g, h) - matrix_unit(dim, h, g)));
    }
  return out;
}

std::string Generator::kind_name() const {
  switch (kind_) {
    case Kind::gkls: return "gkls";
    case Kind::schur: return "schur";
    case Kind::raw: return "raw";
  }
  return "raw";
}

SuperOperator Generator::schrodinger_propagator(double t) const {
  if (cache_) {
    const Vector ev = (-t * cache_->values).array().exp().matrix();
    return {dim_, cache_->vectors * ev.asDiagonal() * cache_->vectors.adjoint()};
  }
  return expm_superop(schrodinger_, -t);
}

SuperOperator Generator::heisenberg_propagator(double t) const { return schrodinger_propagator(t).trace_dual(); }

Matrix Generator::propagate_state(const Matrix& x, double t) const {
  if (cache_) {
    const Vector coeff = cache_->vectors.adjoint() * vec(x);
    const Vector ev = (-t * cache_->values).array().exp().matrix();
    return unvec(cache_->vectors * ev.cwiseProduct(coeff), dim_);
  }
  return schrodinger_propagator(t).apply(x);
}

Generator build_generator(GeneratorSpec spec) {
  Generator g;
  g.spec_ = std::move(spec);
  Matrix heis;
  if (const auto* s = std::get_if<GklsSpec>(&g.spec_)) {
    g.kind_ = Generator::Kind::gkls;
    g.dim_ = s->hamiltonian.dim();
    heis = gkls_heisenberg(*s);
  } else if (const auto* s = std::get_if<SchurSpec>(&g.spec_)) {
    g.kind_ = Generator::Kind::schur;
    validate_symbol(s->symbol);
    g.dim_ = s->symbol.rows();
    heis = schur_heisenberg(*s);
  } else {
    const auto& r = std::get<RawSpec>(g.spec_);
    g.kind_ = Generator::Kind::raw;
    g.dim_ = r.heisenberg.dim();
    heis = r.heisenberg.matrix();
  }
  if (g.dim_ < 1) throw InputError("generator: dimension must be positive");
  g.heisenberg_ = SuperOperator(g.dim_, std::move(heis));
  g.schrodinger_ = g.heisenberg_.trace_dual();

  const Eigen::Index d = g.dim_;
  const double tol = scaled_tol(g.heisenberg_.matrix(), 1e-10);
  if (g.heisenberg_.hermiticity_defect() > 1e-10) throw InputError("generator is not Hermitian-preserving");
  if (g.heisenberg_.apply(Matrix(Matrix::Identity(d, d))).norm() > tol)
    throw InputError("generator does not annihilate the identity (P_t not unital)");
  const Vector one = vec(Matrix::Identity(d, d));
  if ((one.transpose() * g.schrodinger_.matrix()).norm() > tol)
    throw InputError("dual generator is not trace-annihilating (P_t* not trace preserving)");

  const Matrix& ls = g.schrodinger_.matrix();
  const double normality = (ls * ls.adjoint() - ls.adjoint() * ls).norm();
  if (normality <= 1e-10 * std::max(1.0, ls.squaredNorm())) {
    Eigen::ComplexSchur<Matrix> schur(ls);
    if (schur.info() == Eigen::Success) {
      auto cache = std::make_shared<Generator::SpectralCache>();
      cache->vectors = schur.matrixU();
      cache->values = schur.matrixT().diagonal();
      g.cache_ = std::move(cache);
    }
  }

  if (g.kind_ == Generator::Kind::raw) {
    for (double t : {0.1, 1.0}) {
      const double ce = min_eig(choi_matrix(g.heisenberg_propagator(t)));
      if (ce < -1e-9)
        throw InputError("raw generator: exp(-tL) is not completely positive at t = " + std::to_string(t) +
                         " (Choi eigenvalue " + std::to_string(ce) + ")");
    }
  }
  return g;
}

GklsSpec depolarizing_spec(Eigen::Index dim, double rate) {
  return block_depolarizing_spec({dim}, rate);
}

GklsSpec block_depolarizing_spec(const std::vector<Eigen::Index>& block_sizes, double rate) {
  Eigen::Index d = 0;
  for (auto b : block_sizes) d += b;
  GklsSpec s{HermitianOperator::zero(d), {}};
  Eigen::Index off = 0;
  for (auto b : block_sizes) {
    const double c = std::sqrt(rate / static_cast<double>(b));
    for (Eigen::Index i = 0; i < b; ++i)
      for (Eigen::Index j = 0; j < b; ++j) s.jumps.push_back(c * matrix_unit(d, off + i, off + j));
    off += b;
  }
  return s;
}

GklsSpec amplitude_damping_spec(double rate) {
  return {HermitianOperator::zero(2), {std::sqrt(rate) * matrix_unit(2, 0, 1)}};
}

Density evolve(const Generator& gen, const Density& rho, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InputError("evolve: time must be finite and non-negative");
  if (rho.dim() != gen.dim()) throw InputError("evolve: dimension mismatch");
  if (t == 0.0) return rho;
  const HermitianOperator out(gen.propagate_state(rho.matrix(), t));
  const auto sd = herm_eig(out);
  const double lmax = sd.eigenvalues(sd.eigenvalues.size() - 1);
  const double lmin = sd.eigenvalues(0);
  if (lmin >= -1e-10 * std::max(lmax, 0.0)) return Density(out);
  if (lmin < -1e-9) throw NumericalError("evolve: propagated state has eigenvalue " + std::to_string(lmin));
  log_warning("evolve: clamping eigenvalue " + std::to_string(lmin) + " to zero at t = " + std::to_string(t));
  const RealVector clamped = sd.eigenvalues.cwiseMax(0.0);
  return Density(HermitianOperator(sd.eigenvectors * clamped.cast<cplx>().asDiagonal() * sd.eigenvectors.adjoint()));
}

InvariantStates invariant_states(const Generator& gen) {
  const Eigen::Index d = gen.dim();
  InvariantStates out;
  for (Matrix& m : hermitian_kernel_basis(gen.schrodinger().matrix(), d)) out.basis.emplace_back(m);

  // The Cesaro mean of P_t* applied to 1/d dominates every invariant state's
  // support, so a faithful invariant state exists iff this one is faithful.
  const Matrix proj = riesz_kernel_projection(gen.schrodinger().matrix());
  const HermitianOperator avg(unvec(proj * vec(Matrix::Identity(d, d) / static_cast<double>(d)), d));
  const auto sd = herm_eig(avg);
  const double lmax = sd.eigenvalues(d - 1);
  const double lmin = sd.eigenvalues(0);
  if (lmax > 0.0 && lmin > 1e-9 * lmax) {
    out.has_faithful = true;
    out.faithful_state = Density(avg).normalized();
  }
  return out;
}

Matrix gns_weight(const Density& phi) { return SuperOperator::right_multiplication(phi.matrix()).matrix(); }

double gns_symmetry_residual(const Generator& gen, const Density& phi) {
  if (phi.dim() != gen.dim()) throw InputError("gns_symmetry_residual: dimension mismatch");
  const Matrix w = gns_weight(phi);
  double worst = 0.0;
  for (double t : {0.3, 1.0}) {
    const Matrix p = gen.heisenberg_propagator(t).matrix();
    worst = std::max(worst, (p.adjoint() * w - w * p).cwiseAbs().maxCoeff());
  }
  return worst;
}

FixedPointData fixed_point_expectation(const Generator& gen, const Density& phi) {
  check_invariant_faithful(gen, phi);
  if (gns_symmetry_residual(gen, phi) > 1e-8) return fixed_point_expectation_cesaro(gen, phi);

  const Eigen::Index d = gen.dim();
  const Matrix k = kernel_columns(gen.heisenberg().matrix(), 1e-9);
  const Matrix root = mat_sqrt(phi.op()).matrix();
  const Matrix w = kron(root.transpose(), root);
  const Matrix gram = k.adjoint() * w * k;
  const Matrix e = k * gram.ldlt().solve(k.adjoint() * w);
  FixedPointData fp{SuperOperator(d, e), SuperOperator(d, e).trace_dual(),
                    hermitian_kernel_basis(gen.heisenberg().matrix(), d), true};
  check_fixed_point_data(gen, fp);
  return fp;
}

FixedPointData fixed_point_expectation_cesaro(const Generator& gen, const Density& phi) {
  check_invariant_faithful(gen, phi);
  const Eigen::Index d = gen.dim();
  const SuperOperator e(d, riesz_kernel_projection(gen.heisenberg().matrix()));
  FixedPointData fp{e, e.trace_dual(), hermitian_kernel_basis(gen.heisenberg().matrix(), d), false};
  check_fixed_point_data(gen, fp);
  return fp;
}

Matrix modular_flow(const Density& phi, double t, const Matrix& x) {
  if (!phi.is_faithful()) throw DomainError("modular_flow: reference state is singular");
  if (x.rows() != phi.dim() || x.cols() != phi.dim()) throw InputError("modular_flow: dimension mismatch");
  const auto sd = herm_eig(phi.op());
  Vector phase(sd.eigenvalues.size());
  for (Eigen::Index i = 0; i < phase.size(); ++i) phase(i) = std::exp(kI * t * std::log(sd.eigenvalues(i)));
  const Matrix u = sd.eigenvectors * phase.asDiagonal() * sd.eigenvectors.adjoint();
  return u * x * u.adjoint();
}

double spectral_gap(const Generator& gen, const Density& phi) {
  if (!phi.is_faithful()) throw DomainError("spectral_gap: reference state is singular");
  const double res = gns_symmetry_residual(gen, phi);
  if (res > 1e-8) throw DomainError("spectral_gap: generator is not GNS-symmetric (residual " + std::to_string(res) + ")");
  const Matrix root = mat_sqrt(phi.op()).matrix();
  const Matrix inv_root = mat_fn(phi.op(), [](double x) { return 1.0 / std::sqrt(x); }).matrix();
  const Eigen::Index d = gen.dim();
  const Matrix eye = Matrix::Identity(d, d);
  const Matrix s = kron(root.transpose(), eye) * gen.heisenberg().matrix() * kron(inv_root.transpose(), eye);
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (s + s.adjoint()), Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double cut = 1e-9 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) > cut) return ev(i);
  throw DegenerateError("spectral_gap: generator vanishes");
}

}  // namespace entroflow
