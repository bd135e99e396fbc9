#include "entroflow/entropyflow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include <gsl/gsl_multimin.h>

#include "entroflow/errors.hpp"
#include "entroflow/parallel.hpp"

namespace entroflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_invariant(const Generator& gen, const Density& sigma) {
  const double r = gen.schrodinger().apply(sigma.matrix()).norm();
  if (r > 1e-9 * std::max(1.0, sigma.matrix().norm()))
    throw DomainError("reference state is not invariant: |L*(sigma)| = " + std::to_string(r));
}

struct Spectrum {
  RealVector values;
  Matrix vectors;
  bool faithful;
};

Spectrum spectrum_of(const Density& s) {
  auto sd = herm_eig(s.op());
  const Eigen::Index n = sd.eigenvalues.size();
  const double lmax = sd.eigenvalues(n - 1);
  const bool faithful = lmax > 0.0 && sd.eigenvalues(0) >= kSupportCutoff * lmax;
  return {std::move(sd.eigenvalues), std::move(sd.eigenvectors), faithful};
}

// D and I for faithful rho, sigma (both in B of each other).
EntropyPair pair_from_spectra(const Generator& gen, const Density& rho, const Spectrum& r, const Spectrum& s) {
  const Eigen::MatrixXd overlap = (r.vectors.adjoint() * s.vectors).cwiseAbs2();
  const RealVector logp = r.values.array().log().matrix();
  const RealVector logq = s.values.array().log().matrix();
  EntropyPair out;
  out.entropy = r.values.dot(logp) - r.values.dot(overlap * logq);
  const Matrix h = r.vectors * logp.cast<cplx>().asDiagonal() * r.vectors.adjoint() -
                   s.vectors * logq.cast<cplx>().asDiagonal() * s.vectors.adjoint();
  const Matrix lr = gen.schrodinger().apply(rho.matrix());
  // tr(A B) = sum_ij A_ij B_ji
  out.production = (lr.transpose().cwiseProduct(h)).sum().real();
  return out;
}

double fit_decay_rate(const TrajectoryRecord& rec, std::vector<std::string>& notes) {
  std::vector<double> ts, ys;
  for (std::size_t k = 0; k < rec.times.size(); ++k)
    if (rec.entropies[k] > 1e-10) {
      ts.push_back(rec.times[k]);
      ys.push_back(std::log(rec.entropies[k]));
    }
  if (ts.size() < 2) {
    notes.emplace_back("decay fit window has fewer than two points with D > 1e-10");
    return std::numeric_limits<double>::quiet_NaN();
  }
  const double n = static_cast<double>(ts.size());
  double mt = 0.0, my = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    mt += ts[k] / n;
    my += ys[k] / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    sxy += (ts[k] - mt) * (ys[k] - my);
    sxx += (ts[k] - mt) * (ts[k] - mt);
  }
  return -sxy / sxx;
}

// Nelder-Mead over rho = A A^H / tr(A A^H), A complex d x d.
struct LocalSearch {
  const Generator& gen;
  const FixedPointData& fp;
  Eigen::Index dim;
  double floor;
  int evaluations = 0;

  Density decode(const gsl_vector* x) const {
    Matrix a(dim, dim);
    for (Eigen::Index k = 0; k < dim * dim; ++k)
      a(k) = cplx(gsl_vector_get(x, static_cast<std::size_t>(2 * k)), gsl_vector_get(x, static_cast<std::size_t>(2 * k + 1)));
    const Matrix aa = a * a.adjoint();
    return Density(HermitianOperator(aa / aa.trace().real()));
  }

  double objective(const gsl_vector* x) {
    ++evaluations;
    try {
      const auto r = mlsi_ratio(gen, fp, decode(x), floor);
      return r ? *r : 1e10;
    } catch (const Error&) {
      return 1e10;
    }
  }

  static double trampoline(const gsl_vector* x, void* self) { return static_cast<LocalSearch*>(self)->objective(x); }
};

}  // namespace

EntropyPair entropy_and_production(const Generator& gen, const Density& rho, const Density& sigma) {
  if (rho.dim() != gen.dim() || sigma.dim() != gen.dim()) throw InputError("entropy production: dimension mismatch");
  require_invariant(gen, sigma);
  const Spectrum s = spectrum_of(sigma);
  if (!s.faithful) throw DomainError("entropy production: reference state is singular");
  const Spectrum r = spectrum_of(rho);
  if (!r.faithful) throw DomainError("entropy production: state is not in B(sigma)");
  return pair_from_spectra(gen, rho, r, s);
}

double entropy_production(const Generator& gen, const Density& rho, const Density& sigma) {
  return entropy_and_production(gen, rho, sigma).production;
}

TrajectoryRecord trajectory(const Generator& gen, const Density& rho0, const Density& sigma_ref,
                            const std::vector<double>& t_grid) {
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    if (!(t_grid[k] >= 0.0)) throw InputError("trajectory: times must be non-negative");
    if (k > 0 && !(t_grid[k] > t_grid[k - 1])) throw InputError("trajectory: times must be strictly ascending");
  }
  require_invariant(gen, sigma_ref);
  TrajectoryRecord rec;
  for (double t : t_grid) {
    const Density rt = evolve(gen, rho0, t);
    const ExtendedReal d = rel_entropy(rt, sigma_ref);
    if (d.is_infinite()) throw DomainError("trajectory: relative entropy is +inf at t = " + std::to_string(t));
    const auto alpha = balpha_factor(rt, sigma_ref);
    rec.times.push_back(t);
    rec.entropies.push_back(d.value());
    rec.productions.push_back(alpha ? entropy_production(gen, rt, sigma_ref) : kInf);
    rec.alpha_track.push_back(alpha ? *alpha : kInf);
  }
  return rec;
}

DeBruijnResult debruijn_residual(const TrajectoryRecord& rec) {
  DeBruijnResult out;
  const std::size_t n = rec.times.size();
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double hm = rec.times[k] - rec.times[k - 1];
    const double hp = rec.times[k + 1] - rec.times[k];
    if (std::max(hm, hp) > 1e-2) out.coarse_grid = true;
    const double deriv = (hm * hm * rec.entropies[k + 1] - hp * hp * rec.entropies[k - 1] +
                          (hp * hp - hm * hm) * rec.entropies[k]) /
                         (hm * hp * (hm + hp));
    out.max_residual = std::max(out.max_residual, std::abs(deriv + rec.productions[k]));
  }
  return out;
}

double debruijn_residual(const Generator& gen, const Density& rho0, const Density& sigma,
                         const std::vector<double>& times, double h) {
  if (!(h > 0.0)) throw InputError("debruijn_residual: step must be positive");
  require_invariant(gen, sigma);
  auto entropy_at = [&](double t) { return rel_entropy(evolve(gen, rho0, t), sigma).value(); };
  double worst = 0.0;
  for (double t : times) {
    if (!(t >= 0.0)) throw InputError("debruijn_residual: times must be non-negative");
    double deriv;
    if (t >= h) {
      deriv = (entropy_at(t + h) - entropy_at(t - h)) / (2.0 * h);
    } else {
      deriv = (-3.0 * entropy_at(t) + 4.0 * entropy_at(t + h) - entropy_at(t + 2.0 * h)) / (2.0 * h);
    }
    const double prod = entropy_production(gen, evolve(gen, rho0, t), sigma);
    worst = std::max(worst, std::abs(deriv + prod));
  }
  return worst;
}

std::vector<double> linear_grid(double t_max, int steps) {
  if (!(t_max > 0.0) || steps < 2) throw InputError("linear_grid: need t_max > 0 and steps >= 2");
  std::vector<double> g(static_cast<std::size_t>(steps));
  for (int k = 0; k < steps; ++k) g[static_cast<std::size_t>(k)] = t_max * k / (steps - 1);
  return g;
}

std::vector<double> log_grid(double t_min, double t_max, int steps) {
  if (!(t_min > 0.0) || !(t_max > t_min) || steps < 2) throw InputError("log_grid: need 0 < t_min < t_max, steps >= 2");
  std::vector<double> g(static_cast<std::size_t>(steps));
  const double a = std::log(t_min), b = std::log(t_max);
  for (int k = 0; k < steps; ++k) g[static_cast<std::size_t>(k)] = std::exp(a + (b - a) * k / (steps - 1));
  return g;
}

std::optional<double> mlsi_ratio(const Generator& gen, const FixedPointData& fp, const Density& psi, double floor) {
  const Density ref(fp.expectation_star.apply(psi.op()));
  const Spectrum s = spectrum_of(ref);
  const Spectrum r = spectrum_of(psi);
  if (!s.faithful || !r.faithful) throw DomainError("mlsi_ratio: E*(psi) is not in B(psi)");
  const EntropyPair p = pair_from_spectra(gen, psi, r, s);
  if (!(p.entropy > floor)) return std::nullopt;
  return p.production / p.entropy;
}

MlsiReport mlsi_estimate(const Generator& gen, const Density& phi, const MlsiOptions& opt) {
  const FixedPointData fp = fixed_point_expectation(gen, phi);
  const auto samples = sample_states(phi, opt.sampler, opt.seed);
  const auto ratios = parallel_map(static_cast<int>(samples.size()), opt.workers, [&](int k) {
    return mlsi_ratio(gen, fp, samples[static_cast<std::size_t>(k)], opt.entropy_floor);
  });

  MlsiReport rep;
  rep.sample_count = static_cast<int>(samples.size());
  int worst = -1;
  for (std::size_t k = 0; k < ratios.size(); ++k)
    if (ratios[k] && (worst < 0 || *ratios[k] < *ratios[static_cast<std::size_t>(worst)])) worst = static_cast<int>(k);
  if (worst < 0) throw DegenerateError("mlsi_estimate: every sampled state is invariant (D = 0)");
  rep.worst_sample = samples[static_cast<std::size_t>(worst)];
  rep.worst_state = rep.worst_sample;
  rep.beta_ratio = *ratios[static_cast<std::size_t>(worst)];
  rep.evaluations = rep.sample_count;

  // Local refinement from the worst sample.
  const Eigen::Index d = gen.dim();
  const std::size_t n = static_cast<std::size_t>(2 * d * d);
  LocalSearch search{gen, fp, d, opt.entropy_floor};
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(n), &gsl_vector_free);
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> step(gsl_vector_alloc(n), &gsl_vector_free);
  const Matrix a0 = mat_sqrt(rep.worst_sample.op()).matrix();
  for (Eigen::Index k = 0; k < d * d; ++k) {
    gsl_vector_set(x.get(), static_cast<std::size_t>(2 * k), a0(k).real());
    gsl_vector_set(x.get(), static_cast<std::size_t>(2 * k + 1), a0(k).imag());
  }
  const double scale = 0.1 * a0.norm() / static_cast<double>(d);
  gsl_multimin_function fn{&LocalSearch::trampoline, n, &search};
  std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> nm(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n), &gsl_multimin_fminimizer_free);
  double best = rep.beta_ratio;
  for (int restart = 0; restart < opt.nm_restarts; ++restart) {
    gsl_vector_set_all(step.get(), scale / (1 << std::min(restart, 6)));
    gsl_multimin_fminimizer_set(nm.get(), &fn, x.get(), step.get());
    const int start = search.evaluations;
    while (search.evaluations - start < opt.nm_budget) {
      if (gsl_multimin_fminimizer_iterate(nm.get()) != GSL_SUCCESS) break;
      if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(nm.get()), 1e-10) == GSL_SUCCESS) break;
    }
    if (nm->fval < best) {
      best = nm->fval;
      gsl_vector_memcpy(x.get(), nm->x);
    }
  }
  rep.evaluations += search.evaluations;
  if (best < rep.beta_ratio) {
    rep.beta_ratio = best;
    rep.worst_state = search.decode(x.get());
  }

  // The worst sample's own orbit: its states are admissible samples too.
  const Density ref(fp.expectation_star.apply(rep.worst_sample.op()));
  rep.worst_trajectory = trajectory(gen, rep.worst_sample, ref, opt.t_grid);
  for (std::size_t k = 0; k < rep.worst_trajectory.times.size(); ++k) {
    const double dk = rep.worst_trajectory.entropies[k];
    if (dk > opt.entropy_floor) {
      const double r = rep.worst_trajectory.productions[k] / dk;
      if (r < rep.beta_ratio) {
        rep.beta_ratio = r;
        rep.worst_state = evolve(gen, rep.worst_sample, rep.worst_trajectory.times[k]);
      }
    }
  }
  rep.beta_fit = fit_decay_rate(rep.worst_trajectory, rep.violations);
  if (std::isfinite(rep.beta_fit) && rep.beta_ratio > 1.05 * rep.beta_fit)
    rep.violations.push_back("beta_ratio exceeds 1.05 * beta_fit");
  return rep;
}

double fm_check(const Generator& gen, const FixedPointData& fp, const Density& rho, double beta,
                const std::vector<double>& t_grid) {
  const Density ref(fp.expectation_star.apply(rho.op()));
  const double i0 = entropy_production(gen, rho, ref);
  double worst = -kInf;
  for (double t : t_grid) {
    const double it = entropy_production(gen, evolve(gen, rho, t), ref);
    worst = std::max(worst, it - std::exp(-beta * t) * i0);
  }
  return worst;
}

double fm_check(const Generator& gen, const Density& rho, const Density& phi, double beta,
                const std::vector<double>& t_grid) {
  return fm_check(gen, fixed_point_expectation(gen, phi), rho, beta, t_grid);
}

DecayCertificate decay_certificate(const Generator& gen, const Density& phi, double beta,
                                   const std::vector<Density>& samples, const std::vector<double>& t_grid,
                                   int workers) {
  const FixedPointData fp = fixed_point_expectation(gen, phi);
  struct Worst {
    double margin = -kInf;
    double time = 0.0;
  };
  const auto per = parallel_map(static_cast<int>(samples.size()), workers, [&](int k) {
    const Density& psi = samples[static_cast<std::size_t>(k)];
    const Density ref(fp.expectation_star.apply(psi.op()));
    const double d0 = rel_entropy(psi, ref).value();
    Worst w;
    for (double t : t_grid) {
      const double dt = rel_entropy(evolve(gen, psi, t), ref).value();
      const double m = dt - std::exp(-beta * t) * d0 - 1e-8 * (1.0 + d0);
      if (m > w.margin) w = {m, t};
    }
    return w;
  });
  DecayCertificate c;
  c.beta = beta;
  c.worst_margin = -kInf;
  for (std::size_t k = 0; k < per.size(); ++k)
    if (per[k].margin > c.worst_margin) {
      c.worst_margin = per[k].margin;
      c.worst_index = static_cast<int>(k);
      c.worst_time = per[k].time;
    }
  c.holds = c.worst_margin <= 0.0;
  return c;
}

}  // namespace entroflow
