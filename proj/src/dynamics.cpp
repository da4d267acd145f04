#include "hwretail/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include <fmt/format.h>
#include <json.hpp>

#include "hwretail/error.hpp"
#include "hwretail/parallel.hpp"
#include "hwretail/random.hpp"

namespace hwretail {

Eigen::VectorXd replicator_rhs(const Economy& eco, const State& x) {
  const int k = eco.geo.zones();
  if (x.size() != k) throw DegenerateState("state length does not match the zone count");
  const double alpha = eco.params.alpha();
  const Eigen::VectorXd a = x.unaryExpr([alpha](double v) { return v > 0.0 ? std::pow(v, alpha) : 0.0; });
  const Eigen::VectorXd s = eco.prox.values() * a;
  if (!(a.maxCoeff() > 0.0)) throw DegenerateState("state has no populated zone");
  const Eigen::VectorXd w = eco.geo.demand().cwiseQuotient(s);
  const Eigen::VectorXd market = eco.prox.values().transpose() * w;
  Eigen::VectorXd e = a.cwiseProduct(market) - eco.geo.kappa() * x.cwiseMax(0.0);
  return e;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

Trajectory integrate(const Economy& eco, const State& x0, const IntegrateOptions& opts) {
  const int k = eco.geo.zones();
  if (x0.size() != k) throw DegenerateState("initial state length does not match the zone count");
  if (x0.minCoeff() < 0.0) throw DegenerateState("initial state has negative entries");
  if (!(x0.maxCoeff() > 0.0)) throw DegenerateState("initial state has no populated zone");

  const bool snap = eco.params.alpha() > 1.0;
  auto tidy = [&](State& x, Trajectory& tr) {
    tr.min_entry_before_clamp = std::min(tr.min_entry_before_clamp, x.minCoeff());
    bool clamped = false;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (x[i] < 0.0) {
        if (x[i] < -opts.clamp_eps) clamped = true;
        x[i] = 0.0;
      } else if (snap && x[i] < opts.snap_eps) {
        x[i] = 0.0;
      }
    }
    if (clamped) ++tr.clamped_steps;
  };

  Trajectory tr;
  State x = x0;
  tr.min_entry_before_clamp = x.minCoeff();
  tidy(x, tr);
  double t = 0.0;
  auto push = [&](double time, const State& s) {
    if (opts.record || tr.states.empty()) {
      tr.times.push_back(time);
      tr.states.push_back(s);
    } else {
      tr.times.back() = time;
      tr.states.back() = s;
    }
  };
  push(t, x);

  double residual = equilibrium_residual(eco, x);
  int below = residual <= opts.eq_tol ? 1 : 0;

  Eigen::VectorXd k1 = replicator_rhs(eco, x), k2, k3, k4, k5, k6, k7;
  State y;
  double h = opts.initial_step;
  while (t < opts.t_max && below < 2) {
    if (tr.accepted_steps + tr.rejected_steps >= opts.max_steps) break;
    h = std::min({h, opts.max_step, opts.t_max - t});
    k2 = replicator_rhs(eco, x + h * a21 * k1);
    k3 = replicator_rhs(eco, x + h * (a31 * k1 + a32 * k2));
    k4 = replicator_rhs(eco, x + h * (a41 * k1 + a42 * k2 + a43 * k3));
    k5 = replicator_rhs(eco, x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    k6 = replicator_rhs(eco, x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    y = x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    k7 = replicator_rhs(eco, y);
    const Eigen::VectorXd err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const Eigen::ArrayXd scale = opts.abs_tol + opts.rel_tol * x.cwiseAbs().cwiseMax(y.cwiseAbs()).array();
    const double norm = std::sqrt((err.array() / scale).square().mean());

    if (!(norm <= 1.0)) {
      ++tr.rejected_steps;
      const double shrink = std::isfinite(norm) ? std::max(0.2, 0.9 * std::pow(norm, -0.2)) : 0.2;
      h *= shrink;
      if (h < opts.min_step * std::max(1.0, t))
        throw StiffnessError(fmt::format("step size underflow at t = {}", t), x, t);
      continue;
    }

    ++tr.accepted_steps;
    t += h;
    x = y;
    tidy(x, tr);
    k1 = replicator_rhs(eco, x);  // x may have been clamped, so FSAL is not reused
    push(t, x);
    residual = equilibrium_residual(eco, x);
    below = residual <= opts.eq_tol ? below + 1 : 0;
    const double grow = norm > 0.0 ? std::min(5.0, 0.9 * std::pow(norm, -0.2)) : 5.0;
    h *= std::max(0.2, grow);
  }
  tr.terminal_residual = residual;
  tr.converged = below >= 2;
  return tr;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const auto k = traj.states.empty() ? 0 : traj.states.front().size();
  os << "t";
  for (Eigen::Index i = 0; i < k; ++i) os << ",x_" << (i + 1);
  os << "\n";
  for (std::size_t s = 0; s < traj.states.size(); ++s) {
    os << fmt::format("{:.17g}", traj.times[s]);
    for (Eigen::Index i = 0; i < k; ++i) os << fmt::format(",{:.17g}", traj.states[s][i]);
    os << "\n";
  }
}

State dirichlet_start(int zones, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  State x(zones);
  for (int i = 0; i < zones; ++i) x[i] = exponential1(rng);
  return x / x.sum();
}

double symmetric_distance(const State& x, const State& y, const PermGroup& symmetry) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& g : symmetry.elements()) {
    double d = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      d = std::max(d, std::abs(x[i] - y[g(static_cast<int>(i))]));
      if (d >= best) break;
    }
    best = std::min(best, d);
  }
  return best;
}

namespace {

// Image of x under the group element that makes it lexicographically largest.
State canonical_orientation(const State& x, const PermGroup& symmetry) {
  State best = x;
  State img(x.size());
  for (const auto& g : symmetry.elements()) {
    for (Eigen::Index i = 0; i < x.size(); ++i) img[g(static_cast<int>(i))] = x[i];
    if (std::lexicographical_compare(best.begin(), best.end(), img.begin(), img.end())) best = img;
  }
  return best;
}

}  // namespace

BasinSample basin_sample(const Economy& eco, std::size_t n_samples, std::uint64_t seed,
                         const PermGroup& symmetry, const IntegrateOptions& opts, int workers) {
  if (n_samples < 1) throw Error("basin sampling needs at least one sample");
  if (symmetry.degree() != eco.geo.zones()) throw Error("symmetry group degree does not match the geography");
  IntegrateOptions quiet = opts;
  quiet.record = false;

  struct Outcome {
    bool ok = false;
    Trajectory traj;
  };
  std::vector<Outcome> outcomes(n_samples);
  parallel_for(n_samples, workers, [&](std::size_t i) {
    try {
      outcomes[i].traj = integrate(eco, dirichlet_start(eco.geo.zones(), derive_seed(seed, i)), quiet);
      outcomes[i].ok = true;
    } catch (const NumericalError&) {
      outcomes[i].ok = false;
    }
  });

  BasinSample out;
  out.samples = n_samples;
  std::vector<std::size_t> first_seen;
  for (std::size_t i = 0; i < n_samples; ++i) {
    if (!outcomes[i].ok) {
      ++out.failures;
      continue;
    }
    const auto& tr = outcomes[i].traj;
    if (!tr.converged) ++out.unconverged;
    const State& x = tr.final_state();
    bool placed = false;
    for (auto& c : out.clusters) {
      if (symmetric_distance(x, c.representative, symmetry) <= kBasinClusterTol) {
        ++c.hits;
        placed = true;
        break;
      }
    }
    if (!placed) {
      BasinCluster c;
      c.representative = canonical_orientation(x, symmetry);
      c.hits = 1;
      c.f = potential(eco, x).f;
      c.residual = tr.terminal_residual;
      c.populated = static_cast<int>((x.array() > 1e-6).count());
      out.clusters.push_back(std::move(c));
      first_seen.push_back(i);
    }
  }
  std::vector<std::size_t> order(out.clusters.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return out.clusters[a].hits > out.clusters[b].hits; });
  std::vector<BasinCluster> sorted;
  for (auto i : order) sorted.push_back(std::move(out.clusters[i]));
  out.clusters = std::move(sorted);
  return out;
}

std::string basins_to_json(const BasinSample& sample, std::uint64_t seed) {
  nlohmann::ordered_json j;
  j["samples"] = sample.samples;
  j["seed"] = seed;
  j["failures"] = sample.failures;
  j["unconverged"] = sample.unconverged;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& c : sample.clusters) {
    nlohmann::ordered_json e;
    e["hits"] = c.hits;
    e["populated_zones"] = c.populated;
    e["f"] = c.f;
    e["residual"] = c.residual;
    e["state"] = std::vector<double>(c.representative.begin(), c.representative.end());
    arr.push_back(std::move(e));
  }
  j["clusters"] = std::move(arr);
  return j.dump(2) + "\n";
}

}  // namespace hwretail
