#include <doctest.h>

#include <cmath>
#include <sstream>

#include <Eigen/LU>

#include "hwretail/equilibria.hpp"
#include "hwretail/error.hpp"
#include "hwretail/stochastic.hpp"

using namespace hwretail;

namespace {

ChainSpec two_zone(int n, double eta, double alpha = 1.2, double phi = 0.5) {
  return ChainSpec(Economy(build_ring(2), ModelParams::from_phi(alpha, phi)), n, eta);
}

// Transition probabilities for K = 2 straight from the payoff formula.
Eigen::MatrixXd brute_force(int n, double alpha, double phi, double eta, const Eigen::VectorXd& q, double kappa) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (int k = 0; k <= n; ++k) {  // k retailers in zone 2
    const double x[2] = {double(n - k) / n, double(k) / n};
    double pi[2];
    for (int i = 0; i < 2; ++i) {
      const double s0 = std::pow(x[0], alpha) + phi * std::pow(x[1], alpha);
      const double s1 = phi * std::pow(x[0], alpha) + std::pow(x[1], alpha);
      const double other = i == 0 ? phi : 1.0;
      const double own = i == 0 ? 1.0 : phi;
      const double market = own * q[0] / s0 + other * q[1] / s1;
      // alpha > 1: an empty zone earns nothing and still pays kappa
      pi[i] = (x[i] > 0 ? std::pow(x[i], alpha - 1) * market : 0.0) - kappa;
    }
    const double r0 = 1.0 / (1.0 + std::exp((pi[1] - pi[0]) / eta));
    const double r1 = 1.0 - r0;
    if (k < n) p(k, k + 1) = x[0] * r1;
    if (k > 0) p(k, k - 1) = x[1] * r0;
    p(k, k) = x[0] * r0 + x[1] * r1;
  }
  return p;
}

}  // namespace

TEST_CASE("logit choice") {
  const Eigen::VectorXd flat = Eigen::VectorXd::Constant(4, -0.3);
  CHECK(logit_choice(flat, 0.01).isApproxToConstant(0.25, 1e-15));
  const Eigen::VectorXd mixed = (Eigen::VectorXd(3) << 0.2, -0.5, 0.5).finished();
  CHECK((logit_choice(mixed, 1e6).array() - 1.0 / 3).abs().maxCoeff() < 1e-6);
  const auto r = logit_choice((Eigen::VectorXd(2) << 0.0, -1.0).finished(), 0.5);
  const double sigma2 = 1.0 / (1.0 + std::exp(-2.0));
  CHECK(r[0] == doctest::Approx(sigma2).epsilon(1e-14));
  CHECK(r[0] == doctest::Approx(0.8808).epsilon(1e-4));
  CHECK(r[1] == doctest::Approx(0.1192).epsilon(1e-3));
  // no overflow with huge payoffs
  const auto big = logit_choice((Eigen::VectorXd(2) << 1e4, 1e4 - 1).finished(), 1e-3);
  CHECK(big.allFinite());
  CHECK(big[0] == doctest::Approx(1.0));
  const double inf = std::numeric_limits<double>::infinity();
  const auto r_inf = logit_choice((Eigen::VectorXd(3) << inf, 1.0, inf).finished(), 0.1);
  CHECK(r_inf[0] == 0.5);
  CHECK(r_inf[1] == 0.0);
}

TEST_CASE("state space") {
  CHECK(state_space_size(4, 2) == 5);
  CHECK(state_space_size(8, 4) == 165);
  CHECK(state_space_size(100, 36) > kDefaultStateCap);
  const StateSpace s(5, 3);
  CHECK(s.size() == 21);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(s.index_of(s.counts(i)) == i);
    int total = 0;
    for (int c : s.counts(i)) total += c;
    CHECK(total == 5);
  }
  CHECK(s.balanced() == Counts{2, 2, 1});
  CHECK(s.to_state(s.index_of({5, 0, 0}))[0] == 1.0);
  CHECK_THROWS_AS(StateSpace(100, 36), ResourceLimit);
  CHECK_THROWS_AS(stationary_exact(ChainSpec(Economy(build_square_torus(6), ModelParams::from_phi(1.2, 0.5)), 20, 0.1)),
                  ResourceLimit);
}

TEST_CASE("transition matrix") {
  SUBCASE("single retailer") {
    const auto spec = two_zone(1, 0.1);
    const StateSpace s(1, 2);
    const Eigen::MatrixXd p = Eigen::MatrixXd(transition_matrix(spec, s));
    // a lone retailer earns all demand net of kappa; the empty zone earns -kappa
    const double stay = 1.0 / (1.0 + std::exp(-spec.economy.geo.total_demand() / 0.1));
    CHECK(p(0, 0) == doctest::Approx(stay).epsilon(1e-14));
    CHECK(p(0, 1) == doctest::Approx(1 - stay).epsilon(1e-12));
    CHECK(p(1, 1) == doctest::Approx(stay).epsilon(1e-14));
  }
  SUBCASE("matches the brute-force oracle") {
    const auto spec = two_zone(4, 0.1);
    const StateSpace s(4, 2);
    const Eigen::MatrixXd p = Eigen::MatrixXd(transition_matrix(spec, s));
    const Eigen::MatrixXd q =
        brute_force(4, 1.2, 0.5, 0.1, spec.economy.geo.demand(), spec.economy.geo.kappa());
    // colex order on K = 2 puts the state with k retailers in zone 2 at index k
    for (int k = 0; k <= 4; ++k) CHECK(s.counts(k)[1] == k);
    CHECK((p - q).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("rows are stochastic with neighbor support") {
    const ChainSpec spec(Economy(build_ring(4), ModelParams::from_phi(1.5, 0.3)), 6, 0.2);
    const StateSpace s(6, 4);
    const TransitionMatrix p = transition_matrix(spec, s);
    for (int r = 0; r < p.outerSize(); ++r) {
      double sum = 0;
      for (TransitionMatrix::InnerIterator it(p, r); it; ++it) {
        sum += it.value();
        int l1 = 0;
        for (int z = 0; z < 4; ++z) l1 += std::abs(s.counts(r)[z] - s.counts(it.col())[z]);
        CHECK((l1 == 0 || l1 == 2));
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
}

TEST_CASE("stationary measure") {
  SUBCASE("GTH agrees with a dense linear solve") {
    const ChainSpec spec(Economy(build_ring(3), ModelParams::from_phi(1.3, 0.4)), 5, 0.3);
    const StateSpace s(5, 3);
    const Eigen::MatrixXd p = Eigen::MatrixXd(transition_matrix(spec, s));
    const Eigen::VectorXd mu = stationary_gth(p);
    const Eigen::Index n = p.rows();
    Eigen::MatrixXd a = p.transpose() - Eigen::MatrixXd::Identity(n, n);
    a.row(n - 1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b[n - 1] = 1;
    const Eigen::VectorXd ref = a.fullPivLu().solve(b);
    CHECK((mu - ref).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("fixed point and corner concentration") {
    const auto res = stationary_exact(two_zone(8, 0.05));
    CHECK(res.solver == "gth");
    CHECK(res.fixed_point_error <= 1e-12);
    CHECK(res.probability.sum() == doctest::Approx(1.0).epsilon(1e-14));
    const std::vector<State> corners = {(State(2) << 1, 0).finished(), (State(2) << 0, 1).finished()};
    CHECK(neighborhood_mass(res.space, res.probability, corners, 0.13) > 0.9);
  }
  SUBCASE("noise-dominated limit is multinomial") {
    const auto res = stationary_exact(two_zone(8, 1e6));
    CHECK(total_variation(res.space, res.probability, multinomial_measure(res.space)) <= 1e-3);
  }
  SUBCASE("power iteration on a larger space") {
    const auto res = stationary_exact(two_zone(2100, 1.0));
    CHECK(res.solver == "power");
    CHECK(res.fixed_point_error <= 1e-12);
  }
  SUBCASE("symmetric geography gives a symmetric measure") {
    const ChainSpec spec(Economy(build_ring(4), ModelParams::from_phi(1.2, 0.4)), 6, 0.1);
    const auto res = stationary_exact(spec);
    const auto group = lattice_group(spec.economy.geo);
    for (const auto& g : group.elements()) {
      for (std::size_t i = 0; i < res.space.size(); ++i) {
        Counts moved(4);
        for (int z = 0; z < 4; ++z) moved[g(z)] = res.space.counts(i)[z];
        CHECK(res.probability[res.space.index_of(moved)] == doctest::Approx(res.probability[i]).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("fitted potential") {
  std::vector<double> errors;
  for (int n : {4, 16, 64}) {
    const auto spec = two_zone(n, 0.05);
    const auto res = stationary_exact(spec);
    const auto fit = fit_fN(spec, res);
    CHECK(fit.values[fit.reference] == 0.0);
    CHECK(res.space.counts(fit.reference) == res.space.balanced());
    errors.push_back(fit_sup_error(spec, res, fit));
  }
  CHECK(errors[1] < errors[0]);
  CHECK(errors[2] < errors[1]);

  // The fitted values move with eta at finite N; the gap shrinks as N grows.
  auto eta_gap = [](int n) {
    const auto a = two_zone(n, 0.1), b = two_zone(n, 0.05);
    const auto ra = stationary_exact(a), rb = stationary_exact(b);
    const auto fa = fit_fN(a, ra), fb = fit_fN(b, rb);
    double gap = 0;
    for (Eigen::Index i = 0; i < fa.values.size(); ++i)
      if (std::isfinite(fa.values[i]) && std::isfinite(fb.values[i]))
        gap = std::max(gap, std::abs(fa.values[i] - fb.values[i]) / n);
    return gap;
  };
  CHECK(eta_gap(64) < eta_gap(16));
  CHECK(eta_gap(16) < eta_gap(4));
}

TEST_CASE("simulation") {
  const auto spec = two_zone(8, 0.05);
  const auto a = simulate(spec, 200000, 7);
  const auto b = simulate(spec, 200000, 7);
  CHECK(a.occupation == b.occupation);
  CHECK(a.final_state == b.final_state);
  CHECK(a.expected_time == doctest::Approx(200000.0 / 8));
  CHECK(simulate(spec, 200000, 8).occupation != a.occupation);

  const auto exact = stationary_exact(spec);
  const auto sim = simulate(spec, 1'000'000, 42);
  const auto emp = empirical_measure(sim, exact.space);
  CHECK(emp.sum() == doctest::Approx(1.0));
  const auto swap = lattice_group(spec.economy.geo);
  CHECK(total_variation(exact.space, exact.probability, emp, &swap) <= 0.05);

  const auto noisy = two_zone(8, 1e6);
  const auto sn = simulate(noisy, 1'000'000, 3);
  const StateSpace space(8, 2);
  CHECK(total_variation(space, empirical_measure(sn, space), multinomial_measure(space)) <= 0.05);

  const auto js = simulation_to_json(sim, 0.01, 3);
  CHECK(js.find("\"jumps\": 1000000") != std::string::npos);
}

TEST_CASE("concentration sharpens as noise falls") {
  const std::vector<State> target = {(State(2) << 1, 0).finished(), (State(2) << 0, 1).finished()};
  std::vector<double> mass;
  for (double eta : {0.2, 0.1, 0.05}) {
    const auto res = stationary_exact(two_zone(100, eta));
    mass.push_back(neighborhood_mass(res.space, res.probability, target, 0.1));
  }
  CHECK(mass[1] > mass[0]);
  CHECK(mass[2] >= mass[1]);
  CHECK(mass[2] > 0.99);
}

TEST_CASE("writers") {
  const auto spec = two_zone(3, 0.1);
  const auto res = stationary_exact(spec);
  std::ostringstream os;
  write_stationary_csv(os, res);
  CHECK(os.str().rfind("n_1,n_2,probability\n", 0) == 0);
  std::ostringstream fs;
  write_fitted_csv(fs, res, fit_fN(spec, res));
  const std::string fitted = fs.str();
  CHECK(std::count(fitted.begin(), fitted.end(), '\n') == 5);
  CHECK(to_string(StationaryMethod::empirical) == "empirical");
}
