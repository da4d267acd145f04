#include "hwretail/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "hwretail/error.hpp"
#include "hwretail/parallel.hpp"

namespace hwretail {

InvariantEquilibrium make_state(const SupportPattern& pattern, int zones) {
  if (pattern.support.empty()) throw Error("invariant pattern with empty support");
  InvariantEquilibrium eq{pattern, State::Zero(zones)};
  const double mass = 1.0 / static_cast<double>(pattern.support.size());
  for (int z : pattern.support) {
    if (z < 0 || z >= zones) throw Error("pattern support outside the geography");
    eq.state[z] = mass;
  }
  return eq;
}

std::vector<InvariantEquilibrium> make_states(std::span<const SupportPattern> patterns, int zones) {
  std::vector<InvariantEquilibrium> out;
  out.reserve(patterns.size());
  for (const auto& p : patterns) out.push_back(make_state(p, zones));
  return out;
}

double share_error(const Economy& eco, std::span<const int> support) {
  const auto& phi = eco.prox.values();
  const Eigen::VectorXd& q = eco.geo.demand();
  const int k = eco.geo.zones();
  Eigen::VectorXd agg = Eigen::VectorXd::Zero(k);  // Phi_j over the support
  for (int z : support) agg += phi.col(z);
  const double target = eco.geo.total_demand() / static_cast<double>(support.size());
  double err = 0.0;
  for (int i : support) {
    double share = 0.0;
    for (int j = 0; j < k; ++j) share += phi(j, i) / agg[j] * q[j];
    err = std::max(err, std::abs(share - target));
  }
  return err;
}

InvariantCheck verify_invariant(const Economy& eco, const InvariantEquilibrium& eq) {
  return {equilibrium_residual(eco, eq.state), share_error(eco, eq.pattern.support)};
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::stable: return "stable";
    case Verdict::unstable: return "unstable";
    case Verdict::marginal: return "marginal";
  }
  return "marginal";
}

StabilityReport classify_stability(const Economy& eco, const State& x, double tol) {
  const Eigen::VectorXd pi = payoff(eco, x);
  StabilityReport rep{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
                      Verdict::marginal};
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (!(x[i] > 0.0)) rep.boundary_margin = std::max(rep.boundary_margin, pi[i]);

  const FaceHessian h = potential_hessian(eco, x);
  const int m = static_cast<int>(h.support.size());
  if (m >= 2) {
    const Eigen::MatrixXd basis = simplex_tangent_basis(m);
    const Eigen::MatrixXd projected = basis.transpose() * h.values * basis;
    if (!projected.allFinite())
      throw NumericalError(fmt::format("non-finite tangent Hessian on a face of {} zones", m));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(projected, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
      throw NumericalError(fmt::format("eigen-solver failed on a {}x{} tangent Hessian (max |H| = {})", m - 1,
                                       m - 1, projected.cwiseAbs().maxCoeff()));
    rep.interior_max_eig = solver.eigenvalues().maxCoeff();
  }

  if (rep.boundary_margin > tol || rep.interior_max_eig > tol)
    rep.verdict = Verdict::unstable;
  else if (rep.boundary_margin < -tol && rep.interior_max_eig < -tol)
    rep.verdict = Verdict::stable;
  else
    rep.verdict = Verdict::marginal;
  return rep;
}

double invariant_potential(const Economy& eco, std::span<const int> support) {
  const auto& phi = eco.prox.values();
  Eigen::VectorXd agg = Eigen::VectorXd::Zero(eco.geo.zones());
  for (int z : support) agg += phi.col(z);
  const double m = static_cast<double>(support.size());
  const double alpha = eco.params.alpha();
  const double q = eco.geo.total_demand();
  return -q * std::log(m) + eco.geo.demand().dot(agg.array().log().matrix()) / alpha - eco.geo.kappa();
}

Selection select_global(const Economy& eco, std::span<const InvariantEquilibrium> candidates,
                        double tie_tol) {
  if (candidates.empty()) throw Error("global selection needs at least one candidate");
  Selection sel;
  sel.f_max = -std::numeric_limits<double>::infinity();
  for (const auto& c : candidates) {
    const PotentialValue pv = potential(eco, c.state);
    sel.entries.push_back({c.pattern.id, c.pattern.M, pv.f, pv.g});
    sel.f_max = std::max(sel.f_max, pv.f);
  }
  for (const auto& e : sel.entries)
    if (e.f >= sel.f_max - tie_tol) sel.winners.push_back(e.id);
  std::sort(sel.winners.begin(), sel.winners.end());
  sel.winners.erase(std::unique(sel.winners.begin(), sel.winners.end()), sel.winners.end());
  return sel;
}

std::vector<StabilityRow> stability_table(const Economy& eco,
                                          std::span<const InvariantEquilibrium> candidates, double tol,
                                          int workers) {
  std::vector<StabilityRow> rows(candidates.size());
  parallel_for(candidates.size(), workers, [&](std::size_t i) {
    const auto& c = candidates[i];
    rows[i] = {c.pattern.id, c.pattern.M, classify_stability(eco, c.state, tol), potential(eco, c.state).f};
  });
  return rows;
}

void write_stability_csv(std::ostream& os, const Economy& eco, std::span<const StabilityRow> rows,
                         bool header) {
  if (header) os << "pattern_id,M,phi,alpha,boundary_margin,interior_max_eig,verdict,f\n";
  for (const auto& r : rows)
    os << fmt::format("{},{},{:.17g},{:.17g},{:.17g},{:.17g},{},{:.17g}\n", r.id, r.M, eco.params.phi(),
                      eco.params.alpha(), r.report.boundary_margin, r.report.interior_max_eig,
                      to_string(r.report.verdict), r.f);
}

}  // namespace hwretail
