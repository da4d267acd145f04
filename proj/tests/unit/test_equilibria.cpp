#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "hwretail/dynamics.hpp"
#include "hwretail/equilibria.hpp"
#include "hwretail/symmetry.hpp"

using namespace hwretail;

namespace {

Economy eco2(double alpha, double phi) { return Economy(build_ring(2), ModelParams::from_phi(alpha, phi)); }

const std::vector<SupportPattern>& square_patterns() {
  static const auto p = invariant_supports(build_square_torus(6));
  return p;
}

// x^(k) on a 16-zone ring: every 2^k-th zone populated.
State ring_pattern(int k) {
  State x = State::Zero(16);
  for (int i = 0; i < 16; i += 1 << k) x[i] = 1.0;
  return x / x.sum();
}

// x + eps * v for a random sum-zero v, clipped at zero and renormalized.
State perturb(const State& x, double eps, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  State v(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) v[i] = n(rng);
  v.array() -= v.mean();
  v /= v.cwiseAbs().maxCoeff();
  State y = (x + eps * v).cwiseMax(0.0);
  return y / y.sum();
}

}  // namespace

TEST_CASE("invariant states") {
  const auto& pats = square_patterns();
  const auto uniform = make_state(pats.back(), 36);
  CHECK(uniform.state.isApproxToConstant(1.0 / 36, 1e-15));
  const auto corner = make_state(pats.front(), 36);
  CHECK(corner.state[0] == 1.0);
  CHECK(corner.state.sum() == 1.0);
  for (const auto& p : pats) {
    if (p.M != 4) continue;
    const auto s = make_state(p, 36).state;
    CHECK((s.array() == 0.25).count() == 4);
    CHECK(on_simplex(s));
  }
  CHECK(make_states(pats, 36).size() == 83);
}

TEST_CASE("every invariant pattern is an equilibrium with equal shares") {
  const auto geo = build_square_torus(6);
  const auto states = make_states(square_patterns(), 36);
  for (double phi : {0.1, 0.5, 0.9}) {
    const Economy e(geo, ModelParams::from_phi(1.2, phi));
    for (const auto& s : states) {
      const auto c = verify_invariant(e, s);
      CHECK(c.residual <= 1e-10);
      CHECK(c.share_error <= 1e-12);
    }
  }
  const auto two = invariant_supports(build_ring(2));
  CHECK(verify_invariant(eco2(1.2, 0.3), make_state(two[1], 2)).share_error < 1e-15);
  const Economy e(geo, ModelParams::from_phi(1.2, 0.4));
  // three zones in a row: the middle zone is not equivalent to the ends
  CHECK(share_error(e, std::vector<int>{0, 1, 2}) > 1e-3);
  // two adjacent zones are swapped by a reflection, so their shares agree
  CHECK(share_error(e, std::vector<int>{0, 1}) < 1e-14);
}

TEST_CASE("stability classification") {
  SUBCASE("corners are stable for any phi") {
    for (double phi : {0.05, 0.3, 0.7, 0.95}) {
      const auto r = classify_stability(eco2(1.2, phi), (State(2) << 1, 0).finished());
      CHECK(r.boundary_margin == doctest::Approx(-1.0));
      CHECK(std::isinf(r.interior_max_eig));
      CHECK(r.verdict == Verdict::stable);
    }
  }
  SUBCASE("two-zone dispersion switches at phi*") {
    const double abar = 0.2 / 1.2;
    const double star = (1 - std::sqrt(abar)) / (1 + std::sqrt(abar));
    CHECK(star == doctest::Approx(0.420204).epsilon(1e-6));
    const State x = State::Constant(2, 0.5);
    CHECK(classify_stability(eco2(1.2, star - 1e-3), x).verdict == Verdict::stable);
    CHECK(classify_stability(eco2(1.2, star + 1e-3), x).verdict == Verdict::unstable);
    CHECK(classify_stability(eco2(1.2, star), x).verdict == Verdict::marginal);
    CHECK(std::isinf(classify_stability(eco2(1.2, 0.3), x).boundary_margin));
  }
  SUBCASE("circular economy: all x^(k) stable together") {
    const Economy e(build_ring(16), ModelParams::from_phi(1.05, 0.1));
    for (int k = 0; k <= 4; ++k) {
      CHECK(equilibrium_residual(e, ring_pattern(k)) < 1e-12);
      CHECK(classify_stability(e, ring_pattern(k)).verdict == Verdict::stable);
    }
  }
  SUBCASE("square lattice counts") {
    const auto geo = build_square_torus(6);
    const auto states = make_states(square_patterns(), 36);
    auto stable = [&](double alpha, double phi) {
      const auto rows = stability_table(Economy(geo, ModelParams::from_phi(alpha, phi)), states);
      return std::count_if(rows.begin(), rows.end(), [](auto& r) { return r.report.verdict == Verdict::stable; });
    };
    CHECK(stable(1.2, 0.1) == 83);
    CHECK(stable(2.5, 0.1) == 17);
    CHECK(stable(1.2, 0.5) == 12);
  }
}

TEST_CASE("verdicts agree with the dynamics under small perturbations") {
  const auto geo = build_square_torus(6);
  const Economy e(geo, ModelParams::from_phi(2.5, 0.1));
  const auto states = make_states(square_patterns(), 36);
  const auto rows = stability_table(e, states);
  int stable_checked = 0, unstable_checked = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const State& x = states[i].state;
    if (rows[i].report.verdict == Verdict::stable && stable_checked < 4) {
      ++stable_checked;
      for (std::uint64_t s = 0; s < 10; ++s) {
        const Trajectory t = integrate(e, perturb(x, 1e-4, s), {.record = false});
        CHECK(symmetric_distance(t.final_state(), x, trivial_group(36)) <= 1e-5);
      }
    } else if (rows[i].report.verdict == Verdict::unstable && unstable_checked < 4) {
      ++unstable_checked;
      bool escaped = false;
      for (std::uint64_t s = 0; s < 10 && !escaped; ++s) {
        const Trajectory t = integrate(e, perturb(x, 1e-4, s), {.record = false});
        escaped = (t.final_state() - x).cwiseAbs().maxCoeff() > 1e-3;
      }
      CHECK(escaped);
    }
  }
  CHECK(stable_checked == 4);
  CHECK(unstable_checked == 4);
}

TEST_CASE("global selection") {
  const auto two = invariant_supports(build_ring(2));
  const auto states2 = make_states(two, 2);
  CHECK(select_global(eco2(1.2, 0.2), states2).winners == std::vector<int>{two[1].id});
  CHECK(select_global(eco2(1.2, 0.5), states2).winners == std::vector<int>{two[0].id});

  const auto geo = build_square_torus(6);
  const auto states = make_states(square_patterns(), 36);
  const Economy high(geo, ModelParams::from_phi(1.2, 0.99));
  const Selection sel = select_global(high, states);
  CHECK(sel.winners == std::vector<int>{1});

  SUBCASE("closed-form potential") {
    const Economy e(geo, ModelParams::from_phi(1.7, 0.35));
    for (const auto& s : states)
      CHECK(std::abs(invariant_potential(e, s.pattern.support) - potential(e, s.state).f) < 1e-12);
  }
  SUBCASE("relabeling and symmetry do not change the winners") {
    const Economy e(geo, ModelParams::from_phi(1.2, 0.2));
    const auto base = select_global(e, states);
    auto shuffled = states;
    std::mt19937_64 rng(4);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(select_global(e, shuffled).winners == base.winners);

    const auto g = lattice_group(geo).elements()[77];
    auto moved = states;
    for (auto& s : moved) {
      s.pattern.support = apply_to_set(g, s.pattern.support);
      State y = State::Zero(36);
      for (int z : s.pattern.support) y[z] = 1.0 / s.pattern.M;
      s.state = y;
    }
    CHECK(select_global(e, moved).winners == base.winners);
  }
  SUBCASE("f and g orderings agree") {
    const Economy e(geo, ModelParams::from_phi(1.5, 0.3));
    const auto s = select_global(e, states);
    auto by_f = s.entries, by_g = s.entries;
    std::stable_sort(by_f.begin(), by_f.end(), [](auto& a, auto& b) { return a.f > b.f; });
    std::stable_sort(by_g.begin(), by_g.end(), [](auto& a, auto& b) { return a.g > b.g; });
    for (std::size_t i = 0; i < by_f.size(); ++i) CHECK(by_f[i].id == by_g[i].id);
  }
  SUBCASE("exact ties are all reported") {
    // a corner and its mirror image are separate candidates with equal potential
    std::vector<InvariantEquilibrium> c = {make_state(two[0], 2), make_state(two[0], 2)};
    c[1].pattern.id = 9;
    c[1].state = (State(2) << 0, 1).finished();
    CHECK(select_global(eco2(1.2, 0.6), c).winners == std::vector<int>{1, 9});
  }
}

TEST_CASE("stability table") {
  const auto geo = build_square_torus(6);
  const Economy e(geo, ModelParams::from_phi(1.2, 0.3));
  const auto states = make_states(square_patterns(), 36);
  const auto a = stability_table(e, states, kStabilityTol, 1);
  const auto b = stability_table(e, states, kStabilityTol, 4);
  std::ostringstream sa, sb;
  write_stability_csv(sa, e, a);
  write_stability_csv(sb, e, b);
  CHECK(sa.str() == sb.str());
  CHECK(sa.str().rfind("pattern_id,M,phi,alpha,boundary_margin,interior_max_eig,verdict,f\n", 0) == 0);
  CHECK(to_string(Verdict::marginal) == "marginal");
}
