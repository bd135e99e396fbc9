#pragma once

#include <cmath>
#include <vector>

#include "entroflow/matcore.hpp"
#include "entroflow/statespace.hpp"

namespace testing_support {

using namespace entroflow;

inline double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

/// Classical Kullback-Leibler divergence with 0 log 0 = 0.
inline double classical_kl(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0) s += p[i] * (std::log(p[i]) - std::log(q[i]));
  return s;
}

inline Density diag_density(const std::vector<double>& p) {
  return Density(HermitianOperator::diagonal(p));
}

/// Qubit state with Bloch vector r.
inline Density bloch(double x, double y, double z) {
  Matrix m(2, 2);
  m << cplx(1 + z, 0), cplx(x, -y), cplx(x, y), cplx(1 - z, 0);
  return Density(HermitianOperator(m * 0.5));
}

/// Binary entropy-type closed form D(rho || I/2) for Bloch radius r.
inline double qubit_entropy_vs_mixed(double r) {
  const double a = (1 + r) / 2, b = (1 - r) / 2;
  double s = std::log(2.0);
  if (a > 0) s += a * std::log(a);
  if (b > 0) s += b * std::log(b);
  return s;
}

}  // namespace testing_support
