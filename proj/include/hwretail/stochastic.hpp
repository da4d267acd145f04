#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "hwretail/model.hpp"
#include "hwretail/symmetry.hpp"

namespace hwretail {

/// Finite-population logit chain: N retailers, noise level eta.
struct ChainSpec {
  ChainSpec(Economy eco, int population, double noise);

  Economy economy;
  int N;
  double eta;
};

/// Retailer counts per zone, summing to N.
using Counts = std::vector<int>;

/// rho_j = exp(pi_j / eta) / sum_k exp(pi_k / eta) with max-subtraction. Zones
/// with +infinity payoff share all the probability.
Eigen::VectorXd logit_choice(const Eigen::VectorXd& payoffs, double eta);
Eigen::VectorXd logit_choice(const Economy& eco, const State& x, double eta);

/// C(N + K - 1, K - 1), saturating at UINT64_MAX.
std::uint64_t state_space_size(int population, int zones);

inline constexpr std::size_t kDefaultStateCap = 200'000;

/// The grid of count vectors, in colexicographic order.
class StateSpace {
 public:
  StateSpace(int population, int zones, std::size_t cap = kDefaultStateCap);

  int population() const { return n_; }
  int zones() const { return k_; }
  std::size_t size() const { return states_.size(); }
  const Counts& counts(std::size_t i) const { return states_[i]; }
  std::size_t index_of(const Counts& c) const;
  State to_state(std::size_t i) const;
  /// Counts as equal as possible, extra retailers in the lowest zones.
  Counts balanced() const;

 private:
  int n_;
  int k_;
  std::vector<Counts> states_;
  std::map<Counts, std::size_t> index_;
};

using TransitionMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Jump-chain transition probabilities: x -> x + (e_j - e_i)/N with probability
/// x_i rho_j(x) for j != i, and self-loop sum_i x_i rho_i(x).
TransitionMatrix transition_matrix(const ChainSpec& spec, const StateSpace& space);

enum class StationaryMethod { exact_solve, closed_form_fit, empirical };
std::string_view to_string(StationaryMethod m);

struct StationaryResult {
  StateSpace space;
  Eigen::VectorXd probability;
  StationaryMethod method = StationaryMethod::exact_solve;
  std::string solver;           ///< "gth" or "power"
  double fixed_point_error = 0;  ///< || mu P - mu ||_inf
};

/// States at or below this count use the dense GTH elimination; larger spaces
/// use lazy power iteration on the sparse matrix.
inline constexpr std::size_t kDenseStationaryLimit = 2'000;

StationaryResult stationary_exact(const ChainSpec& spec, std::size_t cap = kDefaultStateCap);

/// Stationary vector of an irreducible stochastic matrix by Grassmann-Taksar-Heyman
/// state reduction (no subtractions, so small probabilities keep relative accuracy).
Eigen::VectorXd stationary_gth(Eigen::MatrixXd p);

struct FittedPotential {
  Eigen::VectorXd values;          ///< f^N per state, NaN where mu underflowed
  std::size_t reference = 0;       ///< index of the balanced state, where f^N = 0
  std::size_t excluded = 0;
};

/// f^N(x) = eta [log mu(x) - log multinomial(N; Nx)] - (same at the balanced state).
FittedPotential fit_fN(const ChainSpec& spec, const StationaryResult& result);

/// sup over fitted states of |(1/N) f^N(x) - (f(x) - f(x_ref))|.
double fit_sup_error(const ChainSpec& spec, const StationaryResult& result, const FittedPotential& fitted);

/// Multinomial(N; 1/K) weights over the space (payoff-blind limit).
Eigen::VectorXd multinomial_measure(const StateSpace& space);

struct SimulationSummary {
  std::uint64_t jumps = 0;
  std::uint64_t seed = 0;
  int N = 0;
  double eta = 0;
  double expected_time = 0;  ///< jumps / N: the chain jumps at common rate N
  Counts start;
  Counts final_state;
  std::map<Counts, std::uint64_t> occupation;  ///< visits per state, one per jump epoch
};

/// Discrete jump-chain simulation from `start` (default: balanced counts).
SimulationSummary simulate(const ChainSpec& spec, std::uint64_t jumps, std::uint64_t seed,
                           std::optional<Counts> start = std::nullopt);

/// Empirical frequencies laid out on a state space.
Eigen::VectorXd empirical_measure(const SimulationSummary& sim, const StateSpace& space);

/// Total variation distance, optionally after quotienting states by a zone
/// permutation group (states in one orbit are merged).
double total_variation(const StateSpace& space, const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                       const PermGroup* quotient = nullptr);

/// Probability of states within `radius` (infinity norm on x = counts/N) of any target.
double neighborhood_mass(const StateSpace& space, const Eigen::VectorXd& measure,
                         std::span<const State> targets, double radius);

void write_stationary_csv(std::ostream& os, const StationaryResult& result);
void write_fitted_csv(std::ostream& os, const StationaryResult& result, const FittedPotential& fitted);
std::string simulation_to_json(const SimulationSummary& sim, std::optional<double> tv_to_exact,
                               std::size_t top = 10);

}  // namespace hwretail
