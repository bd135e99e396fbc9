#include "entroflow/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "entroflow/errors.hpp"

namespace entroflow {

namespace {

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw InputError(std::string(what) + ": non-finite entries");
}

}  // namespace

HermitianOperator::HermitianOperator(const Matrix& entries) {
  if (entries.rows() != entries.cols()) throw InputError("HermitianOperator: matrix is not square");
  require_finite(entries, "HermitianOperator");
  m_ = 0.5 * (entries + entries.adjoint());
}

HermitianOperator HermitianOperator::identity(Eigen::Index dim) {
  return HermitianOperator(Matrix::Identity(dim, dim));
}

HermitianOperator HermitianOperator::zero(Eigen::Index dim) {
  return HermitianOperator(Matrix::Zero(dim, dim));
}

HermitianOperator HermitianOperator::diagonal(std::span<const double> diag) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(diag.size()), static_cast<Eigen::Index>(diag.size()));
  for (std::size_t i = 0; i < diag.size(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = diag[i];
  return HermitianOperator(m);
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& o) const {
  return HermitianOperator(m_ + o.m_);
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator& o) const {
  return HermitianOperator(m_ - o.m_);
}

HermitianOperator HermitianOperator::operator*(double s) const { return HermitianOperator(m_ * s); }

Matrix SpectralDecomposition::reconstruct() const {
  return eigenvectors * eigenvalues.cast<cplx>().asDiagonal() * eigenvectors.adjoint();
}

// ---------------------------------------------------------------------------
// SuperOperator

SuperOperator::SuperOperator(Eigen::Index dim, Matrix matrix) : dim_(dim), m_(std::move(matrix)) {
  if (m_.rows() != dim * dim || m_.cols() != dim * dim)
    throw InputError("SuperOperator: matrix must be dim^2 x dim^2");
  require_finite(m_, "SuperOperator");
}

SuperOperator SuperOperator::identity(Eigen::Index dim) {
  return SuperOperator(dim, Matrix::Identity(dim * dim, dim * dim));
}

SuperOperator SuperOperator::zero(Eigen::Index dim) {
  return SuperOperator(dim, Matrix::Zero(dim * dim, dim * dim));
}

SuperOperator SuperOperator::sandwich(const Matrix& a, const Matrix& b) {
  const Eigen::Index d = a.rows();
  const Matrix bt = b.transpose();
  Matrix k(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) k.block(i * d, j * d, d, d) = bt(i, j) * a;
  return SuperOperator(d, std::move(k));
}

SuperOperator SuperOperator::left_multiplication(const Matrix& a) {
  return sandwich(a, Matrix::Identity(a.rows(), a.rows()));
}

SuperOperator SuperOperator::right_multiplication(const Matrix& b) {
  return sandwich(Matrix::Identity(b.rows(), b.rows()), b);
}

SuperOperator SuperOperator::from_map(Eigen::Index dim, const std::function<Matrix(const Matrix&)>& f) {
  Matrix m(dim * dim, dim * dim);
  for (Eigen::Index c = 0; c < dim; ++c)
    for (Eigen::Index r = 0; r < dim; ++r) m.col(r + c * dim) = vec(f(matrix_unit(dim, r, c)));
  return SuperOperator(dim, std::move(m));
}

Matrix SuperOperator::apply(const Matrix& x) const {
  if (x.rows() != dim_ || x.cols() != dim_) throw InputError("SuperOperator::apply: dimension mismatch");
  return unvec(m_ * vec(x), dim_);
}

HermitianOperator SuperOperator::apply(const HermitianOperator& x) const {
  return HermitianOperator(apply(x.matrix()));
}

SuperOperator SuperOperator::operator+(const SuperOperator& o) const { return {dim_, m_ + o.m_}; }
SuperOperator SuperOperator::operator-(const SuperOperator& o) const { return {dim_, m_ - o.m_}; }
SuperOperator SuperOperator::operator*(cplx s) const { return {dim_, m_ * s}; }
SuperOperator SuperOperator::operator*(const SuperOperator& o) const { return {dim_, m_ * o.m_}; }

SuperOperator SuperOperator::trace_dual() const {
  // tr(r S(x)) = <r^H, S(x)>_HS, so S^dual(r) = (S^H(r^H))^H; with P the
  // transposition permutation on vec this is P S^T P.
  const Eigen::Index d = dim_;
  Matrix out(d * d, d * d);
  auto p = [d](Eigen::Index k) { return (k % d) * d + k / d; };
  for (Eigen::Index c = 0; c < d * d; ++c)
    for (Eigen::Index r = 0; r < d * d; ++r) out(r, c) = m_(p(c), p(r));
  return {d, std::move(out)};
}

SuperOperator SuperOperator::hs_adjoint() const { return {dim_, m_.adjoint()}; }

bool SuperOperator::is_diagonal(double tol) const {
  for (Eigen::Index c = 0; c < m_.cols(); ++c)
    for (Eigen::Index r = 0; r < m_.rows(); ++r)
      if (r != c && std::abs(m_(r, c)) > tol) return false;
  return true;
}

double SuperOperator::hermiticity_defect(int probes) const {
  // Deterministic Hermitian probes: matrix units symmetrized, plus a dense one.
  double worst = 0.0;
  const Eigen::Index d = dim_;
  for (int p = 0; p < probes; ++p) {
    Matrix x(d, d);
    for (Eigen::Index c = 0; c < d; ++c)
      for (Eigen::Index r = 0; r < d; ++r)
        x(r, c) = cplx(std::cos(0.7 * (r + 1) * (p + 1) + 0.3 * c), std::sin(1.3 * (c + 2) * (p + 1) - 0.5 * r));
    x = (x + x.adjoint()).eval();
    const Matrix y = apply(x);
    worst = std::max(worst, (y - y.adjoint()).norm() / std::max(1.0, y.norm()));
  }
  return worst;
}

Vector vec(const Matrix& x) {
  return Eigen::Map<const Vector>(x.data(), x.size());
}

Matrix unvec(const Vector& v, Eigen::Index dim) {
  return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

// ---------------------------------------------------------------------------
// Spectral calculus

SpectralDecomposition herm_eig(const HermitianOperator& a) {
  if (!a.matrix().allFinite()) throw InputError("herm_eig: non-finite entries");
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.matrix());
  if (es.info() != Eigen::Success) throw NumericalError("herm_eig: eigensolver did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

HermitianOperator mat_fn(const HermitianOperator& a, const std::function<double(double)>& f,
                         double support_cutoff) {
  const auto sd = herm_eig(a);
  const Eigen::Index n = sd.eigenvalues.size();
  if (n == 0) return a;
  const double lmax = sd.eigenvalues(n - 1);
  const double lmin = sd.eigenvalues(0);
  if (lmin < -1e-8 * std::max(lmax, 0.0) || (lmax <= 0.0 && lmin < 0.0))
    throw NotPsdError("mat_fn: operator is not positive semidefinite (min eigenvalue " + std::to_string(lmin) + ")");
  RealVector fv(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double l = sd.eigenvalues(i);
    fv(i) = (lmax > 0.0 && l >= support_cutoff * lmax) ? f(l) : 0.0;
  }
  return HermitianOperator(sd.eigenvectors * fv.cast<cplx>().asDiagonal() * sd.eigenvectors.adjoint());
}

HermitianOperator mat_log(const HermitianOperator& a, double support_cutoff) {
  return mat_fn(a, [](double x) { return std::log(x); }, support_cutoff);
}

HermitianOperator mat_sqrt(const HermitianOperator& a) {
  return mat_fn(a, [](double x) { return std::sqrt(x); });
}

HermitianOperator support_projection(const HermitianOperator& a, double support_cutoff) {
  return mat_fn(a, [](double) { return 1.0; }, support_cutoff);
}

SuperOperator expm_superop(const SuperOperator& s, double t) {
  if (!std::isfinite(t)) throw InputError("expm_superop: non-finite time");
  const Eigen::Index n = s.matrix().rows();
  if (t == 0.0) return SuperOperator::identity(s.dim());
  const Matrix& m = s.matrix();
  const double scale = std::max(1.0, m.squaredNorm());
  const double normality = (m * m.adjoint() - m.adjoint() * m).norm();
  Matrix out;
  if (normality <= 1e-10 * scale) {
    Eigen::ComplexSchur<Matrix> schur(m);
    if (schur.info() != Eigen::Success) throw NumericalError("expm_superop: Schur decomposition failed");
    const Matrix& u = schur.matrixU();
    Vector ev(n);
    for (Eigen::Index i = 0; i < n; ++i) ev(i) = std::exp(t * schur.matrixT()(i, i));
    out = u * ev.asDiagonal() * u.adjoint();
  } else {
    out = (t * m).exp();
  }
  if (!out.allFinite())
    throw NumericalError("expm_superop: overflow (t = " + std::to_string(t) +
                         ", |S|_F = " + std::to_string(m.norm()) + ")");
  return {s.dim(), std::move(out)};
}

HermitianOperator choi_matrix(const SuperOperator& s) {
  const Eigen::Index d = s.dim();
  Matrix c(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      c.block(i * d, j * d, d, d) = unvec(s.matrix().col(i + j * d), d);
  return HermitianOperator(c);
}

double min_eig(const HermitianOperator& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double max_eig(const HermitianOperator& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

double trace_norm(const HermitianOperator& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

double operator_norm(const HermitianOperator& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Matrix matrix_unit(Eigen::Index dim, Eigen::Index row, Eigen::Index col) {
  Matrix e = Matrix::Zero(dim, dim);
  e(row, col) = 1.0;
  return e;
}

}  // namespace entroflow
