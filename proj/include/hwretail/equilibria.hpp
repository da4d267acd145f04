#pragma once

#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "hwretail/model.hpp"
#include "hwretail/symmetry.hpp"

namespace hwretail {

/// Uniform mass 1/M on the support of a pattern.
struct InvariantEquilibrium {
  SupportPattern pattern;
  State state;
};

InvariantEquilibrium make_state(const SupportPattern& pattern, int zones);
std::vector<InvariantEquilibrium> make_states(std::span<const SupportPattern> patterns, int zones);

struct InvariantCheck {
  double residual;     ///< equilibrium_residual of the state
  double share_error;  ///< max over support of |aggregate market share - Q/M|
};

InvariantCheck verify_invariant(const Economy& eco, const InvariantEquilibrium& eq);
/// Share error of uniform mass on an arbitrary support.
double share_error(const Economy& eco, std::span<const int> support);

enum class Verdict { stable, unstable, marginal };
std::string_view to_string(Verdict v);

inline constexpr double kStabilityTol = 1e-9;

struct StabilityReport {
  double boundary_margin;   ///< max payoff over empty zones (-inf if none)
  double interior_max_eig;  ///< largest tangent-space eigenvalue of the face Hessian (-inf if M = 1)
  Verdict verdict;
};

/// Local stability of a spatial equilibrium under the replicator dynamics:
/// stable iff empty zones earn strictly negative profit and the potential is
/// strictly concave along the face of the simplex spanned by the support.
StabilityReport classify_stability(const Economy& eco, const State& x, double tol = kStabilityTol);

inline constexpr double kTieTol = 1e-10;

struct SelectionEntry {
  int id;
  int M;
  double f;
  double g;
};

struct Selection {
  std::vector<int> winners;  ///< pattern ids within tie_tol of the maximum, ascending
  double f_max;
  std::vector<SelectionEntry> entries;  ///< one per candidate, input order
};

/// Global potential maximizers among the candidates.
Selection select_global(const Economy& eco, std::span<const InvariantEquilibrium> candidates,
                        double tie_tol = kTieTol);

/// Potential of uniform mass on each support: -Q log M + (1/alpha) sum_j Q_j log Phi_j - kappa,
/// evaluated without building states. Matches potential() on make_state().
double invariant_potential(const Economy& eco, std::span<const int> support);

struct StabilityRow {
  int id;
  int M;
  StabilityReport report;
  double f;
};

std::vector<StabilityRow> stability_table(const Economy& eco,
                                          std::span<const InvariantEquilibrium> candidates,
                                          double tol = kStabilityTol, int workers = 1);

/// CSV `pattern_id,M,phi,alpha,boundary_margin,interior_max_eig,verdict,f`.
void write_stability_csv(std::ostream& os, const Economy& eco, std::span<const StabilityRow> rows,
                         bool header = true);

}  // namespace hwretail
