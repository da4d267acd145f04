#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hwretail/equilibria.hpp"
#include "hwretail/geometry.hpp"
#include "hwretail/symmetry.hpp"

namespace hwretail {

/// "a:b:step" -> a, a + step, ..., up to b (inclusive within step/1e6).
/// Values are a + i * step, so grids do not accumulate rounding.
std::vector<double> make_range(std::string_view spec);
std::vector<double> make_range(double first, double last, double step);

struct SweepGrid {
  SweepGrid(std::vector<double> phi, std::vector<double> alpha);

  std::vector<double> phi_values;
  std::vector<double> alpha_values;
};

/// phi 0.01..0.99 step 0.01, alpha 1.0..3.0 step 0.05.
SweepGrid default_grid();

// ---- two-zone economy ----

/// (1 - sqrt(abar)) / (1 + sqrt(abar)), abar = (alpha - 1) / alpha. NaN for alpha <= 1.
double phi_star_closed_form(double alpha);
/// Root of (1 + phi)^2 / phi = 4^alpha in (0, 1): (4^a - 2 - sqrt(4^a (4^a - 4))) / 2.
double phi_double_star_derived(double alpha);
/// Variant with 4^a - 1 under the root in place of 4^a - 4. Can be negative.
double phi_double_star_printed(double alpha);

struct TwoZoneRow {
  double phi;
  Verdict dispersion;
  Verdict corner;
  double dispersion_eig;  ///< tangent second derivative of f at (1/2, 1/2)
  double f_dispersion;
  double f_corner;
  std::string winner;     ///< "dispersion", "agglomeration" or "tie"
};

struct Bifurcation {
  double alpha;
  std::vector<TwoZoneRow> rows;
  double phi_star;                ///< bisection on the dispersion eigenvalue (NaN if no sign change)
  double phi_star_closed;
  double phi_double_star;         ///< bisection on f(dispersion) - f(corner)
  double phi_double_star_closed;  ///< derived closed form
  double phi_double_star_printed;
};

Bifurcation bifurcation_2zone(double alpha, std::span<const double> phi_grid);

/// Rows as CSV preceded by `# key,value` lines holding the thresholds.
void write_bifurcation_csv(std::ostream& os, const Bifurcation& b);
Bifurcation read_bifurcation_csv(std::istream& in);

// ---- partition of the (phi, alpha) plane ----

struct PartitionCell {
  double phi;
  double alpha;
  std::vector<int> winner_ids;  ///< ascending
  int winner_M;                 ///< largest M among tied winners
  double f_max;
};

/// Global potential maximizer among the candidates at each grid point, alpha-major.
std::vector<PartitionCell> partition(const Geography& geo, const SweepGrid& grid,
                                     std::span<const SupportPattern> candidates, int workers = 1,
                                     double tie_tol = kTieTol);

/// CSV `phi,alpha,winner_ids,winner_M,f_max`; tied ids are joined with ';'.
void write_partition_csv(std::ostream& os, std::span<const PartitionCell> cells);
std::vector<PartitionCell> read_partition_csv(std::istream& in);

struct Regime {
  double phi_begin;
  double phi_end;  ///< last grid point of the run
  std::vector<int> winner_ids;
  int winner_M;
  double boundary_after;  ///< refined switch point to the next regime (NaN for the last)
};

/// Maximal runs of identical winner sets along increasing phi at one alpha.
/// Boundaries are refined by bisection on the potential difference of the two winners.
std::vector<Regime> regimes_along_phi(const Geography& geo, std::span<const PartitionCell> cells,
                                      double alpha, std::span<const SupportPattern> candidates);

/// Distinct winner pattern ids across all cells.
std::vector<int> distinct_winners(std::span<const PartitionCell> cells);

/// True if winner_M never increases along any phi row or alpha column.
bool partition_monotone(std::span<const PartitionCell> cells);

// ---- local stability ranges ----

struct PhiInterval {
  double lo;
  double hi;
};

struct PatternRange {
  int id;
  int M;
  std::vector<Verdict> verdicts;  ///< per grid point
  std::vector<bool> winner;       ///< per grid point
  std::vector<PhiInterval> stable;
  std::vector<PhiInterval> global;
};

struct StabilityRanges {
  double alpha;
  std::vector<double> phi_grid;
  std::vector<PatternRange> patterns;
};

/// Per-pattern phi intervals of local stability and of global selection. Interval
/// ends between grid points are located by bisection to 1e-6.
StabilityRanges stability_ranges(const Geography& geo, double alpha, std::span<const double> phi_grid,
                                 std::span<const SupportPattern> candidates, int workers = 1);

std::string stability_ranges_to_json(const StabilityRanges& r);
StabilityRanges stability_ranges_from_json(std::istream& in);

}  // namespace hwretail
