#include "hwretail/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>

#include <fmt/format.h>
#include <json.hpp>

#include "hwretail/error.hpp"
#include "hwretail/random.hpp"

namespace hwretail {

ChainSpec::ChainSpec(Economy eco, int population, double noise)
    : economy(std::move(eco)), N(population), eta(noise) {
  if (N < 1) throw Error(fmt::format("population N must be at least 1, got {}", N));
  if (!(eta > 0.0) || !std::isfinite(eta)) throw Error(fmt::format("noise eta must be positive, got {}", eta));
}

Eigen::VectorXd logit_choice(const Eigen::VectorXd& payoffs, double eta) {
  const Eigen::Index k = payoffs.size();
  Eigen::VectorXd rho(k);
  const double top = payoffs.maxCoeff();
  if (std::isinf(top) && top > 0) {
    for (Eigen::Index i = 0; i < k; ++i) rho[i] = std::isinf(payoffs[i]) && payoffs[i] > 0 ? 1.0 : 0.0;
    return rho / rho.sum();
  }
  for (Eigen::Index i = 0; i < k; ++i) rho[i] = std::exp((payoffs[i] - top) / eta);
  return rho / rho.sum();
}

Eigen::VectorXd logit_choice(const Economy& eco, const State& x, double eta) {
  return logit_choice(payoff(eco, x), eta);
}

std::uint64_t state_space_size(int population, int zones) {
  // C(N + K - 1, K - 1) built incrementally; each partial product is an exact binomial.
  const std::uint64_t n = static_cast<std::uint64_t>(population);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i < static_cast<std::uint64_t>(zones); ++i) {
    const std::uint64_t num = n + i;
    if (r > std::numeric_limits<std::uint64_t>::max() / num) return std::numeric_limits<std::uint64_t>::max();
    r = r * num / i;
  }
  return r;
}

namespace {

bool colex_less(const Counts& a, const Counts& b) {
  return std::lexicographical_compare(a.rbegin(), a.rend(), b.rbegin(), b.rend());
}

void compositions(int remaining, std::size_t pos, Counts& cur, std::vector<Counts>& out) {
  if (pos + 1 == cur.size()) {
    cur[pos] = remaining;
    out.push_back(cur);
    return;
  }
  for (int v = 0; v <= remaining; ++v) {
    cur[pos] = v;
    compositions(remaining - v, pos + 1, cur, out);
  }
}

}  // namespace

StateSpace::StateSpace(int population, int zones, std::size_t cap) : n_(population), k_(zones) {
  if (population < 1 || zones < 1) throw Error("state space needs N >= 1 and K >= 1");
  const std::uint64_t count = state_space_size(population, zones);
  if (count > cap)
    throw ResourceLimit(fmt::format(
        "state space of {} states exceeds the cap {}; use simulate() for large chains", count, cap));
  Counts cur(static_cast<std::size_t>(zones));
  compositions(population, 0, cur, states_);
  std::sort(states_.begin(), states_.end(), colex_less);
  for (std::size_t i = 0; i < states_.size(); ++i) index_.emplace(states_[i], i);
}

std::size_t StateSpace::index_of(const Counts& c) const {
  auto it = index_.find(c);
  if (it == index_.end()) throw Error("counts are not in the state space");
  return it->second;
}

State StateSpace::to_state(std::size_t i) const {
  State x(k_);
  for (int z = 0; z < k_; ++z) x[z] = static_cast<double>(states_[i][static_cast<std::size_t>(z)]) / n_;
  return x;
}

Counts StateSpace::balanced() const {
  Counts c(static_cast<std::size_t>(k_), n_ / k_);
  for (int z = 0; z < n_ % k_; ++z) ++c[static_cast<std::size_t>(z)];
  return c;
}

TransitionMatrix transition_matrix(const ChainSpec& spec, const StateSpace& space) {
  const int k = space.zones();
  if (k != spec.economy.geo.zones()) throw Error("state space and geography disagree on the zone count");
  std::vector<Eigen::Triplet<double>> entries;
  const double n = spec.N;
  for (std::size_t s = 0; s < space.size(); ++s) {
    const Counts& c = space.counts(s);
    const Eigen::VectorXd rho = logit_choice(spec.economy, space.to_state(s), spec.eta);
    double stay = 0.0;
    Counts next = c;
    for (int i = 0; i < k; ++i) {
      if (c[static_cast<std::size_t>(i)] == 0) continue;
      const double xi = c[static_cast<std::size_t>(i)] / n;
      stay += xi * rho[i];
      for (int j = 0; j < k; ++j) {
        if (j == i || rho[j] == 0.0) continue;
        --next[static_cast<std::size_t>(i)];
        ++next[static_cast<std::size_t>(j)];
        entries.emplace_back(static_cast<int>(s), static_cast<int>(space.index_of(next)), xi * rho[j]);
        ++next[static_cast<std::size_t>(i)];
        --next[static_cast<std::size_t>(j)];
      }
    }
    entries.emplace_back(static_cast<int>(s), static_cast<int>(s), stay);
  }
  TransitionMatrix p(static_cast<Eigen::Index>(space.size()), static_cast<Eigen::Index>(space.size()));
  p.setFromTriplets(entries.begin(), entries.end());
  return p;
}

std::string_view to_string(StationaryMethod m) {
  switch (m) {
    case StationaryMethod::exact_solve: return "exact_solve";
    case StationaryMethod::closed_form_fit: return "closed_form_fit";
    case StationaryMethod::empirical: return "empirical";
  }
  return "exact_solve";
}

Eigen::VectorXd stationary_gth(Eigen::MatrixXd p) {
  const Eigen::Index n = p.rows();
  for (Eigen::Index k = n - 1; k >= 1; --k) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) s += p(k, j);
    if (!(s > 0.0))
      throw NumericalError(fmt::format("GTH reduction hit a zero pivot at state {} (reducible or underflow)", k));
    for (Eigen::Index i = 0; i < k; ++i) p(i, k) /= s;
    for (Eigen::Index i = 0; i < k; ++i) {
      const double pik = p(i, k);
      if (pik == 0.0) continue;
      for (Eigen::Index j = 0; j < k; ++j) p(i, j) += pik * p(k, j);
    }
  }
  Eigen::VectorXd pi(n);
  pi[0] = 1.0;
  for (Eigen::Index k = 1; k < n; ++k) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) acc += pi[i] * p(i, k);
    pi[k] = acc;
  }
  return pi / pi.sum();
}

namespace {

Eigen::VectorXd stationary_power(const TransitionMatrix& p) {
  const Eigen::Index n = p.rows();
  Eigen::VectorXd mu = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  const Eigen::SparseMatrix<double> pt = p.transpose();
  constexpr int max_iter = 2'000'000;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd next = 0.5 * (mu + pt * mu);  // lazy chain, aperiodic
    next /= next.sum();
    const double delta = (next - mu).cwiseAbs().maxCoeff();
    mu = std::move(next);
    if (delta < 1e-16) return mu;
  }
  throw NumericalError("power iteration for the stationary distribution did not converge");
}

}  // namespace

StationaryResult stationary_exact(const ChainSpec& spec, std::size_t cap) {
  StationaryResult r{StateSpace(spec.N, spec.economy.geo.zones(), cap), {}, StationaryMethod::exact_solve, {}, 0.0};
  const TransitionMatrix p = transition_matrix(spec, r.space);
  if (r.space.size() <= kDenseStationaryLimit) {
    r.probability = stationary_gth(Eigen::MatrixXd(p));
    r.solver = "gth";
  } else {
    r.probability = stationary_power(p);
    r.solver = "power";
  }
  const Eigen::VectorXd moved = p.transpose() * r.probability;
  r.fixed_point_error = (moved - r.probability).cwiseAbs().maxCoeff();
  return r;
}

namespace {

double log_multinomial(const Counts& c, int n) {
  double v = std::lgamma(n + 1.0);
  for (int ci : c) v -= std::lgamma(ci + 1.0);
  return v;
}

}  // namespace

FittedPotential fit_fN(const ChainSpec& spec, const StationaryResult& result) {
  const auto& space = result.space;
  FittedPotential fit;
  fit.values.resize(static_cast<Eigen::Index>(space.size()));
  fit.reference = space.index_of(space.balanced());
  for (std::size_t s = 0; s < space.size(); ++s) {
    const double mu = result.probability[static_cast<Eigen::Index>(s)];
    if (!(mu > 0.0)) {
      fit.values[static_cast<Eigen::Index>(s)] = std::numeric_limits<double>::quiet_NaN();
      ++fit.excluded;
      continue;
    }
    fit.values[static_cast<Eigen::Index>(s)] = spec.eta * (std::log(mu) - log_multinomial(space.counts(s), spec.N));
  }
  const double ref = fit.values[static_cast<Eigen::Index>(fit.reference)];
  if (std::isnan(ref)) throw NumericalError("stationary probability of the balanced state underflowed");
  fit.values.array() -= ref;
  return fit;
}

double fit_sup_error(const ChainSpec& spec, const StationaryResult& result, const FittedPotential& fitted) {
  const auto& space = result.space;
  const double f_ref = potential(spec.economy, space.to_state(fitted.reference)).f;
  double err = 0.0;
  for (std::size_t s = 0; s < space.size(); ++s) {
    const double v = fitted.values[static_cast<Eigen::Index>(s)];
    if (std::isnan(v)) continue;
    const double f = potential(spec.economy, space.to_state(s)).f - f_ref;
    err = std::max(err, std::abs(v / spec.N - f));
  }
  return err;
}

Eigen::VectorXd multinomial_measure(const StateSpace& space) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(space.size()));
  const double log_k = std::log(static_cast<double>(space.zones()));
  for (std::size_t s = 0; s < space.size(); ++s)
    w[static_cast<Eigen::Index>(s)] =
        std::exp(log_multinomial(space.counts(s), space.population()) - space.population() * log_k);
  return w / w.sum();
}

SimulationSummary simulate(const ChainSpec& spec, std::uint64_t jumps, std::uint64_t seed,
                           std::optional<Counts> start) {
  const int k = spec.economy.geo.zones();
  SimulationSummary sim;
  sim.jumps = jumps;
  sim.seed = seed;
  sim.N = spec.N;
  sim.eta = spec.eta;
  sim.expected_time = static_cast<double>(jumps) / spec.N;
  if (start) {
    if (static_cast<int>(start->size()) != k || std::accumulate(start->begin(), start->end(), 0) != spec.N ||
        std::any_of(start->begin(), start->end(), [](int v) { return v < 0; }))
      throw Error("simulation start must be nonnegative counts summing to N");
    sim.start = *start;
  } else {
    sim.start.assign(static_cast<std::size_t>(k), spec.N / k);
    for (int z = 0; z < spec.N % k; ++z) ++sim.start[static_cast<std::size_t>(z)];
  }

  std::mt19937_64 rng(seed);
  std::map<Counts, Eigen::VectorXd> rho_cache;
  constexpr std::size_t cache_limit = 1u << 20;
  Counts c = sim.start;
  State x(k);
  for (std::uint64_t step = 0; step < jumps; ++step) {
    ++sim.occupation[c];
    auto it = rho_cache.find(c);
    Eigen::VectorXd rho_local;
    const Eigen::VectorXd* rho;
    if (it != rho_cache.end()) {
      rho = &it->second;
    } else {
      for (int z = 0; z < k; ++z) x[z] = static_cast<double>(c[static_cast<std::size_t>(z)]) / spec.N;
      rho_local = logit_choice(spec.economy, x, spec.eta);
      if (rho_cache.size() < cache_limit) {
        rho = &rho_cache.emplace(c, std::move(rho_local)).first->second;
      } else {
        rho = &rho_local;
      }
    }
    // Revising retailer drawn uniformly, then the destination by the logit rule.
    int pick = static_cast<int>(uniform01(rng) * spec.N);
    int from = 0;
    while (pick >= c[static_cast<std::size_t>(from)]) pick -= c[static_cast<std::size_t>(from++)];
    const double u = uniform01(rng);
    double acc = 0.0;
    int to = k - 1;
    for (int j = 0; j < k; ++j) {
      acc += (*rho)[j];
      if (u < acc) {
        to = j;
        break;
      }
    }
    if (to != from) {
      --c[static_cast<std::size_t>(from)];
      ++c[static_cast<std::size_t>(to)];
    }
  }
  sim.final_state = c;
  return sim;
}

Eigen::VectorXd empirical_measure(const SimulationSummary& sim, const StateSpace& space) {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.size()));
  for (const auto& [c, visits] : sim.occupation) m[static_cast<Eigen::Index>(space.index_of(c))] += visits;
  return m / static_cast<double>(sim.jumps);
}

double total_variation(const StateSpace& space, const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                       const PermGroup* quotient) {
  if (!quotient) return 0.5 * (a - b).cwiseAbs().sum();
  std::map<Counts, double> diff;
  Counts img(static_cast<std::size_t>(space.zones()));
  for (std::size_t s = 0; s < space.size(); ++s) {
    const Counts& c = space.counts(s);
    Counts best = c;
    for (const auto& g : quotient->elements()) {
      for (int z = 0; z < space.zones(); ++z) img[static_cast<std::size_t>(g(z))] = c[static_cast<std::size_t>(z)];
      if (img < best) best = img;
    }
    diff[best] += a[static_cast<Eigen::Index>(s)] - b[static_cast<Eigen::Index>(s)];
  }
  double tv = 0.0;
  for (const auto& [c, d] : diff) tv += std::abs(d);
  return 0.5 * tv;
}

double neighborhood_mass(const StateSpace& space, const Eigen::VectorXd& measure,
                         std::span<const State> targets, double radius) {
  double mass = 0.0;
  for (std::size_t s = 0; s < space.size(); ++s) {
    const State x = space.to_state(s);
    for (const auto& t : targets) {
      if ((x - t).cwiseAbs().maxCoeff() <= radius + 1e-12) {
        mass += measure[static_cast<Eigen::Index>(s)];
        break;
      }
    }
  }
  return mass;
}

void write_stationary_csv(std::ostream& os, const StationaryResult& result) {
  const auto& space = result.space;
  for (int z = 0; z < space.zones(); ++z) os << "n_" << (z + 1) << ",";
  os << "probability\n";
  for (std::size_t s = 0; s < space.size(); ++s) {
    for (int v : space.counts(s)) os << v << ",";
    os << fmt::format("{:.17g}\n", result.probability[static_cast<Eigen::Index>(s)]);
  }
}

void write_fitted_csv(std::ostream& os, const StationaryResult& result, const FittedPotential& fitted) {
  const auto& space = result.space;
  for (int z = 0; z < space.zones(); ++z) os << "n_" << (z + 1) << ",";
  os << "fN,fN_over_N\n";
  for (std::size_t s = 0; s < space.size(); ++s) {
    for (int v : space.counts(s)) os << v << ",";
    const double v = fitted.values[static_cast<Eigen::Index>(s)];
    os << fmt::format("{:.17g},{:.17g}\n", v, v / space.population());
  }
}

std::string simulation_to_json(const SimulationSummary& sim, std::optional<double> tv_to_exact, std::size_t top) {
  std::vector<std::pair<Counts, std::uint64_t>> visits(sim.occupation.begin(), sim.occupation.end());
  std::stable_sort(visits.begin(), visits.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (visits.size() > top) visits.resize(top);
  nlohmann::ordered_json j;
  j["jumps"] = sim.jumps;
  j["seed"] = sim.seed;
  j["N"] = sim.N;
  j["eta"] = sim.eta;
  j["expected_time"] = sim.expected_time;
  j["start"] = sim.start;
  j["final_state"] = sim.final_state;
  j["distinct_states"] = sim.occupation.size();
  auto arr = nlohmann::ordered_json::array();
  for (const auto& [c, v] : visits)
    arr.push_back({{"counts", c}, {"frequency", static_cast<double>(v) / static_cast<double>(sim.jumps)}});
  j["occupation_top_states"] = std::move(arr);
  if (tv_to_exact) j["tv_to_exact"] = *tv_to_exact;
  return j.dump(2) + "\n";
}

}  // namespace hwretail
