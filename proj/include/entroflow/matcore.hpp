#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace entroflow {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Relative cutoff below which eigenvalues count as kernel directions.
inline constexpr double kSupportCutoff = 1e-12;

/// Complex Hermitian matrix. Construction symmetrizes A <- (A + A^H)/2.
class HermitianOperator {
 public:
  HermitianOperator() = default;
  explicit HermitianOperator(const Matrix& entries);

  static HermitianOperator identity(Eigen::Index dim);
  static HermitianOperator zero(Eigen::Index dim);
  static HermitianOperator diagonal(std::span<const double> diag);

  Eigen::Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  double trace() const { return m_.trace().real(); }

  HermitianOperator operator+(const HermitianOperator& o) const;
  HermitianOperator operator-(const HermitianOperator& o) const;
  HermitianOperator operator*(double s) const;
  friend HermitianOperator operator*(double s, const HermitianOperator& a) { return a * s; }

 private:
  Matrix m_;
};

struct SpectralDecomposition {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // columns

  Matrix reconstruct() const;
};

/// Linear map on dim x dim matrices, stored as a dim^2 x dim^2 matrix acting
/// on column-major vectorized operators: vec(A X B) = (B^T kron A) vec(X).
class SuperOperator {
 public:
  SuperOperator() = default;
  SuperOperator(Eigen::Index dim, Matrix matrix);

  static SuperOperator identity(Eigen::Index dim);
  static SuperOperator zero(Eigen::Index dim);
  static SuperOperator left_multiplication(const Matrix& a);   // X -> A X
  static SuperOperator right_multiplication(const Matrix& b);  // X -> X B
  static SuperOperator sandwich(const Matrix& a, const Matrix& b);  // X -> A X B
  static SuperOperator from_map(Eigen::Index dim, const std::function<Matrix(const Matrix&)>& f);

  Eigen::Index dim() const { return dim_; }
  const Matrix& matrix() const { return m_; }

  Matrix apply(const Matrix& x) const;
  HermitianOperator apply(const HermitianOperator& x) const;

  SuperOperator operator+(const SuperOperator& o) const;
  SuperOperator operator-(const SuperOperator& o) const;
  SuperOperator operator*(cplx s) const;
  /// Composition: (A * B)(x) = A(B(x)).
  SuperOperator operator*(const SuperOperator& o) const;

  /// Dual with respect to the trace pairing: tr(S^dual(r) x) = tr(r S(x)).
  SuperOperator trace_dual() const;
  /// Adjoint with respect to the Hilbert-Schmidt inner product tr(a^H b).
  SuperOperator hs_adjoint() const;

  bool is_diagonal(double tol = 0.0) const;
  double hermiticity_defect(int probes = 4) const;

 private:
  Eigen::Index dim_ = 0;
  Matrix m_;
};

Vector vec(const Matrix& x);
Matrix unvec(const Vector& v, Eigen::Index dim);

SpectralDecomposition herm_eig(const HermitianOperator& a);

/// Spectral calculus restricted to the support: eigenvalues below
/// support_cutoff * lambda_max are mapped to 0.
HermitianOperator mat_fn(const HermitianOperator& a, const std::function<double(double)>& f,
                         double support_cutoff = kSupportCutoff);
HermitianOperator mat_log(const HermitianOperator& a, double support_cutoff = kSupportCutoff);
HermitianOperator mat_sqrt(const HermitianOperator& a);
/// Orthogonal projection onto the support.
HermitianOperator support_projection(const HermitianOperator& a, double support_cutoff = kSupportCutoff);

/// exp(t S). Eigendecomposition when S is normal, otherwise scaling and squaring.
SuperOperator expm_superop(const SuperOperator& s, double t);

/// C = sum_ij E_ij kron S(E_ij); S completely positive <=> C PSD.
HermitianOperator choi_matrix(const SuperOperator& s);

double min_eig(const HermitianOperator& a);
double max_eig(const HermitianOperator& a);
double trace_norm(const HermitianOperator& a);
double operator_norm(const HermitianOperator& a);

/// Matrix unit |row><col|.
Matrix matrix_unit(Eigen::Index dim, Eigen::Index row, Eigen::Index col);

}  // namespace entroflow
