#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hwretail/error.hpp"
#include "hwretail/geometry.hpp"

using namespace hwretail;

namespace {

// zone numbers are 1-based in these checks
double d(const Geography& g, int a, int b) { return g.dist()(a - 1, b - 1); }

bool is_metric(const Eigen::MatrixXd& m) {
  const auto k = m.rows();
  for (Eigen::Index i = 0; i < k; ++i) {
    if (m(i, i) != 0) return false;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (m(i, j) != m(j, i)) return false;
      for (Eigen::Index l = 0; l < k; ++l)
        if (m(i, l) > m(i, j) + m(j, l)) return false;
    }
  }
  return true;
}

// Floyd-Warshall on the explicit 6-neighbour triangular graph; independent of the BFS builder.
Eigen::MatrixXd tri_oracle(int n) {
  const int k = n * n;
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(k, k, 1e9);
  const int off[6][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, -1}, {-1, 1}};
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const int z = r * n + c;
      m(z, z) = 0;
      for (auto& o : off) m(z, ((r + o[0] + n) % n) * n + (c + o[1] + n) % n) = 1;
    }
  for (int via = 0; via < k; ++via)
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) m(i, j) = std::min(m(i, j), m(i, via) + m(via, j));
  return m;
}

}  // namespace

TEST_CASE("ring distances") {
  const Geography two = build_ring(2);
  CHECK(two.dist() == (Eigen::MatrixXd(2, 2) << 0, 1, 1, 0).finished());
  const Geography g = build_ring(16);
  CHECK(d(g, 1, 9) == 8);
  CHECK(d(g, 1, 16) == 1);
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) CHECK(g.dist()(i, j) == std::min(std::abs(i - j), 16 - std::abs(i - j)));
  CHECK(g.demand().isApproxToConstant(1.0 / 16));
  CHECK(g.kappa() == doctest::Approx(1.0));
  CHECK_THROWS_AS(build_ring(1), InvalidGeography);
}

TEST_CASE("square torus distances match the figure numbering") {
  const Geography g = build_square_torus(6);
  CHECK(g.zones() == 36);
  CHECK(d(g, 1, 2) == 1);
  CHECK(d(g, 1, 9) == 3);
  CHECK(d(g, 1, 36) == 2);
  CHECK(d(g, 1, 28) == 5);
  CHECK(d(g, 1, 7) == 1);
  CHECK(g.dist().maxCoeff() == 6);
  CHECK(d(g, 1, 22) == 6);
  CHECK_THROWS_AS(build_square_torus(1), InvalidGeography);
}

TEST_CASE("square torus equals the wraparound L1 closed form") {
  for (int n = 2; n <= 8; ++n) {
    const Geography g = build_square_torus(n);
    for (int a = 0; a < n * n; ++a)
      for (int b = 0; b < n * n; ++b) {
        const int dr = std::abs(a / n - b / n), dc = std::abs(a % n - b % n);
        REQUIRE(g.dist()(a, b) == std::min(dr, n - dr) + std::min(dc, n - dc));
      }
  }
}

TEST_CASE("builders produce metrics") {
  for (int n = 2; n <= 8; ++n) {
    CHECK(is_metric(build_ring(n).dist()));
    CHECK(is_metric(build_square_torus(n).dist()));
    CHECK(is_metric(build_tri_torus(n).dist()));
  }
}

TEST_CASE("square torus is vertex transitive") {
  const Geography g = build_square_torus(6);
  auto sorted_row = [&](int i) {
    const Eigen::VectorXd row = g.dist().row(i).transpose();
    std::vector<double> r(row.data(), row.data() + row.size());
    std::sort(r.begin(), r.end());
    return r;
  };
  const auto ref = sorted_row(0);
  for (int i = 1; i < 36; ++i) CHECK(sorted_row(i) == ref);
}

TEST_CASE("triangular torus") {
  const Geography g = build_tri_torus(6);
  CHECK(g.zones() == 36);
  for (int i = 0; i < 36; ++i) CHECK((g.dist().row(i).array() == 1.0).count() == 6);
  CHECK(g.dist() == g.dist().transpose());
  CHECK(g.dist().diagonal().isZero());
  CHECK(g.dist().maxCoeff() == 4);  // frozen golden value from the Floyd-Warshall oracle
  for (int n = 3; n <= 7; ++n) CHECK(build_tri_torus(n).dist() == tri_oracle(n));
  CHECK_THROWS_AS(build_tri_torus(1), InvalidGeography);
}

TEST_CASE("proximity") {
  const auto p2 = proximity(build_ring(2), ModelParams::from_phi(1.2, 0.5));
  CHECK(p2.values() == (Eigen::MatrixXd(2, 2) << 1, 0.5, 0.5, 1).finished());
  const Geography sq = build_square_torus(6);
  const auto p = proximity(sq, ModelParams::from_phi(1.2, 0.3));
  CHECK(p(0, 27) == doctest::Approx(0.00243).epsilon(1e-12));
  const auto near1 = proximity(sq, ModelParams::from_phi(1.2, 1 - 1e-12));
  CHECK((near1.values().array() > 1 - 1e-10).all());
  for (int i = 0; i < 36; ++i)
    for (int j = 0; j < 36; ++j)
      for (int l = 0; l < 36; ++l)
        if (sq.dist()(i, j) < sq.dist()(i, l)) REQUIRE(p(i, j) > p(i, l));
}

TEST_CASE("model parameters") {
  const auto a = ModelParams::from_beta(1.2, 0.7);
  CHECK(std::abs(a.phi() - std::exp(-0.7)) < 1e-12);
  const auto b = ModelParams::from_phi(2.0, 0.25);
  CHECK(std::abs(b.phi() - std::exp(-b.beta())) < 1e-12);
  CHECK_THROWS(ModelParams::from_phi(1.2, 1.0));
  CHECK_THROWS(ModelParams::from_phi(1.2, 0.0));
  CHECK_THROWS(ModelParams::from_phi(0.0, 0.5));
  CHECK_THROWS(ModelParams::from_beta(1.2, -1.0));
}

TEST_CASE("geography files") {
  const auto dir = std::filesystem::temp_directory_path() / "hwretail_test_geometry";
  std::filesystem::create_directories(dir);

  SUBCASE("round trip") {
    const Geography g = build_square_torus(6);
    save_geography(g, dir / "sq.json");
    const Geography back = load_geography(dir / "sq.json");
    CHECK(back.dist() == g.dist());
    CHECK(back.demand() == g.demand());
    CHECK(back.kappa() == g.kappa());
  }
  SUBCASE("lattice shorthand") {
    std::istringstream in(R"({"kind": "tri", "n": 4})");
    CHECK(parse_geography(in).dist() == build_tri_torus(4).dist());
  }
  SUBCASE("asymmetric distances rejected") {
    std::istringstream in(R"({"kind":"custom","dist":[[0,1],[2,0]],"demand":[0.5,0.5],"kappa":1})");
    CHECK_THROWS_AS(parse_geography(in), InvalidGeography);
  }
  SUBCASE("negative demand rejected") {
    std::istringstream in(R"({"kind":"custom","dist":[[0,1],[1,0]],"demand":[-0.5,1.5],"kappa":1})");
    CHECK_THROWS_AS(parse_geography(in), InvalidGeography);
  }
  SUBCASE("triangle inequality enforced") {
    std::istringstream in(R"({"kind":"custom","dist":[[0,1,5],[1,0,1],[5,1,0]],"demand":[1,1,1],"kappa":3})");
    CHECK_THROWS_AS(parse_geography(in), InvalidGeography);
  }
  SUBCASE("kappa rescaled so that Q / kappa = 1") {
    std::istringstream in(R"({"kind":"custom","dist":[[0,2],[2,0]],"demand":[1,3],"kappa":2})");
    const Geography g = parse_geography(in);
    CHECK(g.kappa() == doctest::Approx(g.total_demand()));
    CHECK(g.kappa_scale() == doctest::Approx(2.0));
  }
  SUBCASE("malformed JSON") {
    std::istringstream in("{not json");
    CHECK_THROWS_AS(parse_geography(in), ParseError);
  }
  SUBCASE("spec strings") {
    CHECK(geography_from_spec("ring:5").zones() == 5);
    CHECK(geography_from_spec("square:3").zones() == 9);
    CHECK_THROWS(geography_from_spec(dir.string() + "/missing.json"));
  }
}
