#include "entroflow/sampling.hpp"

#include <cmath>

#include "entroflow/errors.hpp"

namespace entroflow {

Matrix random_ginibre(Eigen::Index dim, Rng& rng) {
  Matrix g(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c)
    for (Eigen::Index r = 0; r < dim; ++r) {
      const double re = rng.normal();
      const double im = rng.normal();
      g(r, c) = cplx(re, im) / std::sqrt(2.0);
    }
  return g;
}

Matrix random_unitary(Eigen::Index dim, Rng& rng) {
  const Matrix g = random_ginibre(dim, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(dim, dim);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double a = std::abs(r(i, i));
    if (a > 0.0) q.col(i) *= r(i, i) / a;
  }
  return q;
}

HermitianOperator random_hermitian(Eigen::Index dim, Rng& rng) {
  return HermitianOperator(random_ginibre(dim, rng));
}

Density random_hs_density(Eigen::Index dim, Rng& rng) {
  const Matrix g = random_ginibre(dim, rng);
  return Density(HermitianOperator(g * g.adjoint())).normalized();
}

Density random_pure_state(Eigen::Index dim, Rng& rng) {
  Vector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double re = rng.normal();
    const double im = rng.normal();
    v(i) = cplx(re, im);
  }
  v.normalize();
  return Density(HermitianOperator(v * v.adjoint()));
}

Density random_dirichlet_diagonal(Eigen::Index dim, Rng& rng) {
  std::vector<double> w(static_cast<std::size_t>(dim));
  double total = 0.0;
  for (auto& x : w) {
    x = rng.gamma(1.0);
    total += x;
  }
  for (auto& x : w) x /= total;
  return Density(HermitianOperator::diagonal(w));
}

Density random_faithful_density(Eigen::Index dim, Rng& rng, double floor) {
  const Density omega = random_hs_density(dim, rng);
  return Density(omega.op() * (1.0 - floor) + Density::maximally_mixed(dim).op() * floor);
}

Density random_state_in_balpha(const Density& sigma, double alpha, Rng& rng) {
  if (!(alpha > 1.0)) throw InputError("random_state_in_balpha: alpha must exceed 1");
  const Density s = sigma.normalized();
  const Density omega = random_hs_density(s.dim(), rng);
  double eps = 1.0 / alpha;
  for (int it = 0; it < 60; ++it) {
    Density rho(omega.op() * (1.0 - eps) + s.op() * eps);
    const auto a = balpha_factor(rho, s);
    if (a && *a <= alpha) return rho;
    eps = 0.5 * (1.0 + eps);
  }
  return s;
}

SuperOperator random_channel(Eigen::Index dim, int kraus, Rng& rng) {
  std::vector<Matrix> gs;
  Matrix s = Matrix::Zero(dim, dim);
  for (int k = 0; k < kraus; ++k) {
    gs.push_back(random_ginibre(dim, rng));
    s += gs.back().adjoint() * gs.back();
  }
  const Matrix inv_root = mat_fn(HermitianOperator(s), [](double x) { return 1.0 / std::sqrt(x); }).matrix();
  SuperOperator out = SuperOperator::zero(dim);
  for (const Matrix& g : gs) {
    const Matrix k = g * inv_root;
    out = out + SuperOperator::sandwich(k, k.adjoint());
  }
  return out;
}

GklsSpec random_gkls_spec(Eigen::Index dim, int jumps, Rng& rng, double hamiltonian_scale) {
  GklsSpec s{random_hermitian(dim, rng) * hamiltonian_scale, {}};
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  for (int k = 0; k < jumps; ++k) s.jumps.push_back(random_ginibre(dim, rng) * scale);
  return s;
}

Density sample_state(const Density& phi, const SamplerConfig& cfg, std::uint64_t seed, int index) {
  if (cfg.blend_epsilons.empty()) throw InputError("sampler: no blend epsilons");
  Rng rng(seed, static_cast<std::uint64_t>(index));
  const Eigen::Index d = phi.dim();
  const Density ref = phi.normalized();
  const double u = rng.uniform();
  double eps = cfg.blend_epsilons.front();
  for (double e : cfg.blend_epsilons) eps = std::min(eps, e);
  Density omega;
  if (u < cfg.near_pure_fraction) {
    omega = random_pure_state(d, rng);
    eps = 1.0 / cfg.near_pure_alpha;
  } else if (u < cfg.near_pure_fraction + cfg.dirichlet_fraction) {
    omega = random_dirichlet_diagonal(d, rng);
  } else {
    omega = random_hs_density(d, rng);
    eps = cfg.blend_epsilons[rng.below(cfg.blend_epsilons.size())];
  }
  return Density(omega.op() * (1.0 - eps) + ref.op() * eps);
}

std::vector<Density> sample_states(const Density& phi, const SamplerConfig& cfg, std::uint64_t seed) {
  if (cfg.count < 1) throw InputError("sampler: count must be >= 1");
  std::vector<Density> out;
  out.reserve(static_cast<std::size_t>(cfg.count));
  for (int k = 0; k < cfg.count; ++k) out.push_back(sample_state(phi, cfg, seed, k));
  return out;
}

}  // namespace entroflow
