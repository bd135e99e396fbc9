#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "entroflow/qms.hpp"
#include "entroflow/sampling.hpp"
#include "entroflow/statespace.hpp"

namespace entroflow {

/// D(rho_t || sigma) and I_L(rho_t || sigma) along P_t*.
struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<double> entropies;
  std::vector<double> productions;
  std::vector<double> alpha_track;  // balpha_factor(rho_t, sigma); +inf when rho_t is singular
};

struct EntropyPair {
  double entropy = 0.0;
  double production = 0.0;
};

/// Entropy production tr(L*(rho) (log rho - log sigma)). Requires rho in
/// B(sigma) (both faithful in finite dimension) and L*(sigma) = 0.
double entropy_production(const Generator& gen, const Density& rho, const Density& sigma);
/// D(rho || sigma) and I(rho || sigma) from one pair of eigendecompositions.
EntropyPair entropy_and_production(const Generator& gen, const Density& rho, const Density& sigma);

TrajectoryRecord trajectory(const Generator& gen, const Density& rho0, const Density& sigma_ref,
                            const std::vector<double>& t_grid);

struct DeBruijnResult {
  double max_residual = 0.0;
  bool coarse_grid = false;  // grid spacing exceeded 1e-2 somewhere
};

/// max over interior nodes of |dD/dt + I| with second-order three-point
/// differences on the record's own grid.
DeBruijnResult debruijn_residual(const TrajectoryRecord& record);
/// Same identity with central differences of step h evaluated at each time.
double debruijn_residual(const Generator& gen, const Density& rho0, const Density& sigma,
                         const std::vector<double>& times, double h = 1e-4);

std::vector<double> linear_grid(double t_max, int steps);
std::vector<double> log_grid(double t_min, double t_max, int steps);

struct MlsiOptions {
  SamplerConfig sampler;
  std::uint64_t seed = 0;
  int workers = 1;
  std::vector<double> t_grid = linear_grid(5.0, 51);
  int nm_budget = 500;    // evaluations per restart after the initial simplex
  int nm_restarts = 8;
  double entropy_floor = 1e-7;  // ratios are only formed when D exceeds this; below it rounding in D dominates
};

struct MlsiReport {
  double beta_ratio = 0.0;  // infimum of I/D over samples, local search and the worst trajectory
  double beta_fit = 0.0;    // -slope of log D(t) for the worst sample
  Density worst_state;
  Density worst_sample;
  int sample_count = 0;
  int evaluations = 0;
  std::vector<std::string> violations;
  TrajectoryRecord worst_trajectory;
};

/// I(psi || E*psi) / D(psi || E*psi), or nullopt when D <= floor.
std::optional<double> mlsi_ratio(const Generator& gen, const FixedPointData& fp, const Density& psi,
                                 double floor = 1e-7);

MlsiReport mlsi_estimate(const Generator& gen, const Density& phi, const MlsiOptions& options);

/// max over t of I(P_t* rho || E* rho) - exp(-beta t) I(rho || E* rho).
double fm_check(const Generator& gen, const FixedPointData& fp, const Density& rho, double beta,
                const std::vector<double>& t_grid);
double fm_check(const Generator& gen, const Density& rho, const Density& phi, double beta,
                const std::vector<double>& t_grid);

struct DecayCertificate {
  bool holds = true;
  double beta = 0.0;
  double worst_margin = 0.0;  // max of D(t) - exp(-beta t) D(0) - 1e-8 (1 + D(0))
  int worst_index = -1;
  double worst_time = 0.0;
};

DecayCertificate decay_certificate(const Generator& gen, const Density& phi, double beta,
                                   const std::vector<Density>& samples, const std::vector<double>& t_grid,
                                   int workers = 1);

}  // namespace entroflow
