#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "hwretail/model.hpp"
#include "hwretail/symmetry.hpp"

namespace hwretail {

/// E_i(x) = x_i pi_i(x), evaluated without forming x_i * pi_i so that empty
/// zones contribute exactly zero for every alpha.
Eigen::VectorXd replicator_rhs(const Economy& eco, const State& x);

struct IntegrateOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  double eq_tol = 1e-9;       ///< residual threshold for convergence
  double t_max = 1e6;
  double snap_eps = 1e-14;    ///< alpha > 1: entries below this become exactly 0
  double clamp_eps = 1e-10;   ///< negative excursions tolerated before clamping
  double initial_step = 1e-3;
  double min_step = 1e-14;
  /// Keeps the decay modes near an equilibrium (rates of order alpha) inside the
  /// explicit stability region; longer steps stall at tolerance-level oscillation.
  double max_step = 0.25;
  std::size_t max_steps = 5'000'000;
  bool record = true;         ///< keep every accepted step in the trajectory
};

struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  double terminal_residual = 0.0;
  bool converged = false;
  /// Smallest entry produced by any accepted step before clamping.
  double min_entry_before_clamp = 0.0;
  /// Accepted steps that dipped below -clamp_eps and were clamped.
  std::size_t clamped_steps = 0;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;

  const State& final_state() const { return states.back(); }
  double final_time() const { return times.back(); }
};

/// Adaptive Dormand-Prince 5(4) integration of the replicator dynamics until
/// the equilibrium residual stays below eq_tol for two consecutive accepted
/// steps or t_max is reached. Throws StiffnessError on step-size underflow.
Trajectory integrate(const Economy& eco, const State& x0, const IntegrateOptions& opts = {});

void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

struct BasinCluster {
  State representative;  ///< first terminal state of the cluster, in canonical orientation
  std::size_t hits = 0;
  double f = 0.0;
  double residual = 0.0;
  int populated = 0;     ///< zones above 1e-6
};

struct BasinSample {
  std::vector<BasinCluster> clusters;  ///< by hits, descending
  std::size_t samples = 0;
  std::size_t failures = 0;     ///< integrations that threw
  std::size_t unconverged = 0;  ///< reached t_max without converging (still clustered)
};

inline constexpr double kBasinClusterTol = 1e-4;

/// Integrates from flat-Dirichlet starts (stream i seeded by derive_seed(seed, i))
/// and clusters terminal states by infinity-norm distance after symmetry reduction.
BasinSample basin_sample(const Economy& eco, std::size_t n_samples, std::uint64_t seed,
                         const PermGroup& symmetry, const IntegrateOptions& opts = {},
                         int workers = 1);

/// Flat Dirichlet draw on the simplex.
State dirichlet_start(int zones, std::uint64_t seed);

/// min over g of || g.x - y ||_inf, where (g.x)_{g(i)} = x_i.
double symmetric_distance(const State& x, const State& y, const PermGroup& symmetry);

std::string basins_to_json(const BasinSample& sample, std::uint64_t seed);

}  // namespace hwretail
