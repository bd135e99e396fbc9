#include "entroflow/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "entroflow/errors.hpp"

namespace entroflow {

namespace {

Matrix commutator_superop(const Matrix& v) {
  return SuperOperator::left_multiplication(v).matrix() - SuperOperator::right_multiplication(v).matrix();
}

void require_induced_generator(const DiffCalculus& calc, const Generator& gen) {
  if (gen.dim() != calc.dim()) throw DomainError("generator and calculus have different dimensions");
  const Matrix expected = calc.schur_generator().heisenberg().matrix();
  if ((gen.heisenberg().matrix() - expected).cwiseAbs().maxCoeff() > 1e-10)
    throw DomainError("generator is not the Schur generator induced by the calculus");
}

// The gap map's Choi matrix. Left side: C = sum_ab E_ab (x) Phi(E_ab). The
// right action is an anti-representation, so its complete positivity is
// taken over the opposite algebra: C = sum_ab E_ab (x) Phi(E_ba).
Matrix dense_gap_choi(const SuperOperator& comp, const SuperOperator& prop, double damping, ModuleSide side) {
  const Eigen::Index d = comp.dim();
  const Eigen::Index n = d * d;
  const Matrix& t = comp.matrix();
  const Matrix td = t.adjoint();
  Matrix c = Matrix::Zero(d * n, d * n);
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b) {
      const Matrix x = side == ModuleSide::left ? matrix_unit(d, a, b) : matrix_unit(d, b, a);
      const Matrix px = prop.apply(x);
      Matrix phi;
      if (side == ModuleSide::left)
        phi = damping * SuperOperator::left_multiplication(px).matrix() -
              td * SuperOperator::left_multiplication(x).matrix() * t;
      else
        phi = damping * SuperOperator::right_multiplication(px).matrix() -
              td * SuperOperator::right_multiplication(x).matrix() * t;
      c.block(a * n, b * n, n, n) = phi;
    }
  return c;
}

}  // namespace

DiffCalculus::DiffCalculus(std::vector<Eigen::VectorXi> projections, Density phi)
    : projections_(std::move(projections)), phi_(std::move(phi)) {
  const Eigen::Index d = phi_.dim();
  if (!phi_.is_faithful()) throw InputError("calculus: reference state must be faithful");
  for (const auto& v : projections_) {
    if (v.size() != d) throw InputError("calculus: projection has the wrong length");
    for (Eigen::Index g = 0; g < d; ++g)
      if (v(g) != 0 && v(g) != 1) throw InputError("calculus: projections must have 0/1 diagonal entries");
  }
  for (std::size_t i = 0; i < projections_.size(); ++i) {
    const Matrix v = projection_matrix(i);
    if ((v * phi_.matrix() - phi_.matrix() * v).norm() > 1e-12)
      throw InputError("calculus: reference state does not commute with the projections");
  }
}

Matrix DiffCalculus::projection_matrix(std::size_t i) const {
  return projections_.at(i).cast<double>().cast<cplx>().asDiagonal();
}

Eigen::MatrixXd DiffCalculus::symbol() const {
  const Eigen::Index d = dim();
  Eigen::MatrixXd psi = Eigen::MatrixXd::Zero(d, d);
  for (const auto& v : projections_)
    for (Eigen::Index g = 0; g < d; ++g)
      for (Eigen::Index h = 0; h < d; ++h) {
        const double diff = v(g) - v(h);
        psi(g, h) += diff * diff;
      }
  return psi;
}

Generator DiffCalculus::schur_generator() const { return build_generator(SchurSpec{symbol()}); }

std::vector<Matrix> derivation_apply(const DiffCalculus& calc, const Matrix& x) {
  if (x.rows() != calc.dim() || x.cols() != calc.dim()) throw InputError("derivation_apply: dimension mismatch");
  std::vector<Matrix> out;
  for (const auto& v : calc.projections()) {
    Matrix c(x.rows(), x.cols());
    for (Eigen::Index h = 0; h < x.cols(); ++h)
      for (Eigen::Index g = 0; g < x.rows(); ++g) c(g, h) = static_cast<double>(v(g) - v(h)) * x(g, h);
    out.push_back(std::move(c));
  }
  return out;
}

double dirichlet_energy(const DiffCalculus& calc, const Matrix& a) {
  double e = 0.0;
  for (const Matrix& c : derivation_apply(calc, a)) e += c.squaredNorm();
  return e;
}

SuperOperator flip_pinching(const DiffCalculus& calc, std::size_t i) {
  const Matrix v = calc.projection_matrix(i);
  const Matrix w = Matrix::Identity(calc.dim(), calc.dim()) - v;
  return SuperOperator::sandwich(v, v) + SuperOperator::sandwich(w, w);
}

SuperOperator single_flip_semigroup(const DiffCalculus& calc, std::size_t i, double t) {
  if (!(t >= 0.0)) throw InputError("single_flip_semigroup: t must be non-negative");
  const double decay = std::exp(-t);
  return SuperOperator::identity(calc.dim()) * decay + flip_pinching(calc, i) * (1.0 - decay);
}

SuperOperator complementary_flip_semigroup(const DiffCalculus& calc, std::size_t i, double t) {
  SuperOperator out = SuperOperator::identity(calc.dim());
  for (std::size_t j = 0; j < calc.size(); ++j)
    if (j != i) out = out * single_flip_semigroup(calc, j, t);
  return out;
}

std::vector<SuperOperator> intertwine_operator(const IntertwineFamily& fam, double t) {
  if (!(t >= 0.0)) throw InputError("intertwine_operator: t must be non-negative");
  // Every factor is a Schur multiplier on matrix units E_gh: the single-flip
  // map multiplies by 1 when v_j(g) = v_j(h) and by e^{-t} otherwise, and the
  // damped factor by e^{-2t} resp. e^{-t}. Compose the multipliers directly.
  const DiffCalculus& calc = fam.calc;
  const Eigen::Index d = calc.dim();
  const double e1 = std::exp(-t), e2 = std::exp(-2.0 * t);
  std::vector<SuperOperator> out;
  for (std::size_t i = 0; i < calc.size(); ++i) {
    Vector diag(d * d);
    for (Eigen::Index h = 0; h < d; ++h)
      for (Eigen::Index g = 0; g < d; ++g) {
        double m = calc.projection(i)(g) == calc.projection(i)(h) ? e2 : e1;
        for (std::size_t j = 0; j < calc.size(); ++j)
          if (j != i && calc.projection(j)(g) != calc.projection(j)(h)) m *= e1;
        diag(g + h * d) = m;
      }
    out.emplace_back(d, Matrix(diag.asDiagonal()));
  }
  return out;
}

double intertwining_residual(const IntertwineFamily& fam, const Generator& gen, double t) {
  require_induced_generator(fam.calc, gen);
  const Matrix p = gen.heisenberg_propagator(t).matrix();
  const auto comps = intertwine_operator(fam, t);
  double worst = 0.0;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const Matrix c = commutator_superop(fam.calc.projection_matrix(i));
    // Column k is the residual on the k-th matrix unit.
    const Matrix r = c * p - comps[i].matrix() * c;
    worst = std::max(worst, r.colwise().norm().maxCoeff());
  }
  return worst;
}

CpDominanceResult cp_dominance_check_dense(const IntertwineFamily& fam, const Generator& gen, double t,
                                           ModuleSide side) {
  require_induced_generator(fam.calc, gen);
  const Eigen::Index d = gen.dim();
  if (d * d * d > kMaxChoiSide)
    throw SizeError("CP-dominance Choi matrix would have side " + std::to_string(d * d * d) + " > " +
                    std::to_string(kMaxChoiSide) + "; use a smaller ball radius");
  const SuperOperator prop = gen.heisenberg_propagator(t);
  const double damping = std::exp(-2.0 * fam.K * t);
  CpDominanceResult res;
  res.largest_block = d * d * d;
  res.min_eigenvalue = std::numeric_limits<double>::infinity();
  const auto comps = intertwine_operator(fam, t);
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const double m = min_eig(HermitianOperator(dense_gap_choi(comps[i], prop, damping, side)));
    res.per_component.push_back(m);
    if (m < res.min_eigenvalue) {
      res.min_eigenvalue = m;
      res.worst_component = i;
    }
  }
  return res;
}

CpDominanceResult cp_dominance_check(const IntertwineFamily& fam, const Generator& gen, double t, ModuleSide side) {
  require_induced_generator(fam.calc, gen);
  const Eigen::Index d = gen.dim();
  const SuperOperator prop = gen.heisenberg_propagator(t);
  const auto comps = intertwine_operator(fam, t);
  bool diagonal = prop.is_diagonal(1e-14);
  for (const auto& c : comps) diagonal = diagonal && c.is_diagonal(1e-14);
  if (!diagonal) return cp_dominance_check_dense(fam, gen, t, side);
  if (d > kMaxChoiSide) throw SizeError("CP-dominance Choi block exceeds " + std::to_string(kMaxChoiSide));

  // With P_t and T_i diagonal on matrix units, the Choi matrix of the gap map
  // is a direct sum of d blocks of side d:
  //   left,  block k: e^{-2Kt} p(a,b) - conj(tau(a,k)) tau(b,k)
  //   right, block k: e^{-2Kt} p(b,a) - conj(tau(k,a)) tau(k,b)
  // where p and tau are the multipliers of P_t and T_i on E_gh.
  const double damping = std::exp(-2.0 * fam.K * t);
  auto at = [d](const Matrix& m, Eigen::Index g, Eigen::Index h) { return m(g + h * d, g + h * d); };
  CpDominanceResult res;
  res.largest_block = d;
  res.min_eigenvalue = std::numeric_limits<double>::infinity();
  // Rows outside the blocks are zero and contribute the eigenvalue 0.
  const double rest = d > 1 ? 0.0 : std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const Matrix& tau = comps[i].matrix();
    const Matrix& p = prop.matrix();
    double comp_min = rest;
    for (Eigen::Index k = 0; k < d; ++k) {
      Matrix block(d, d);
      for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b)
          block(a, b) = side == ModuleSide::left
                            ? damping * at(p, a, b) - std::conj(at(tau, a, k)) * at(tau, b, k)
                            : damping * at(p, b, a) - std::conj(at(tau, k, a)) * at(tau, k, b);
      comp_min = std::min(comp_min, min_eig(HermitianOperator(block)));
    }
    res.per_component.push_back(comp_min);
    if (comp_min < res.min_eigenvalue) {
      res.min_eigenvalue = comp_min;
      res.worst_component = i;
    }
  }
  return res;
}

}  // namespace entroflow
