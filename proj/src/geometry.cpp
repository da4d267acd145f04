#include "hwretail/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "hwretail/error.hpp"

namespace hwretail {

namespace {

using Adjacency = std::vector<std::vector<int>>;

Eigen::MatrixXd bfs_distances(const Adjacency& adj) {
  const int k = static_cast<int>(adj.size());
  Eigen::MatrixXd dist(k, k);
  std::vector<int> d(k);
  std::deque<int> queue;
  for (int s = 0; s < k; ++s) {
    std::fill(d.begin(), d.end(), -1);
    d[s] = 0;
    queue.assign(1, s);
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (int v : adj[u]) {
        if (d[v] < 0) {
          d[v] = d[u] + 1;
          queue.push_back(v);
        }
      }
    }
    for (int t = 0; t < k; ++t) {
      if (d[t] < 0) throw InvalidGeography("lattice graph is disconnected");
      dist(s, t) = d[t];
    }
  }
  return dist;
}

// Periodic lattice with the given neighbor offsets in (row, col).
Adjacency torus_adjacency(int n, const std::vector<std::pair<int, int>>& offsets) {
  Adjacency adj(n * n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      auto& nb = adj[r * n + c];
      for (auto [dr, dc] : offsets) {
        const int rr = ((r + dr) % n + n) % n;
        const int cc = ((c + dc) % n + n) % n;
        const int j = rr * n + cc;
        if (j != r * n + c && std::find(nb.begin(), nb.end(), j) == nb.end()) nb.push_back(j);
      }
    }
  }
  return adj;
}

Eigen::VectorXd uniform_demand(int k) { return Eigen::VectorXd::Constant(k, 1.0 / k); }

void validate_metric(const Eigen::MatrixXd& dist) {
  const Eigen::Index k = dist.rows();
  if (k < 1 || dist.cols() != k) throw InvalidGeography("dist must be a non-empty square matrix");
  for (Eigen::Index i = 0; i < k; ++i) {
    if (dist(i, i) != 0.0) throw InvalidGeography(fmt::format("dist diagonal nonzero at zone {}", i + 1));
    for (Eigen::Index j = 0; j < k; ++j) {
      if (!std::isfinite(dist(i, j)) || dist(i, j) < 0.0)
        throw InvalidGeography(fmt::format("dist({}, {}) is negative or not finite", i + 1, j + 1));
      if (dist(i, j) != dist(j, i))
        throw InvalidGeography(fmt::format("dist is not symmetric at ({}, {})", i + 1, j + 1));
      if (i != j && dist(i, j) == 0.0)
        throw InvalidGeography(fmt::format("distinct zones {} and {} at zero distance", i + 1, j + 1));
    }
  }
  constexpr double slack = 1e-12;
  for (Eigen::Index m = 0; m < k; ++m)
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index j = 0; j < k; ++j)
        if (dist(i, j) > dist(i, m) + dist(m, j) + slack)
          throw InvalidGeography(fmt::format("triangle inequality violated: zones {}, {} via {}", i + 1,
                                             j + 1, m + 1));
}

}  // namespace

std::string_view to_string(LatticeKind kind) {
  switch (kind) {
    case LatticeKind::ring: return "ring";
    case LatticeKind::square_torus: return "square";
    case LatticeKind::tri_torus: return "tri";
    case LatticeKind::custom: return "custom";
  }
  return "custom";
}

Geography::Geography(LatticeKind kind, int side, Eigen::MatrixXd dist, Eigen::VectorXd demand,
                     double kappa)
    : kind_(kind), side_(side), dist_(std::move(dist)), demand_(std::move(demand)), kappa_(kappa) {
  validate_metric(dist_);
  if (demand_.size() != dist_.rows())
    throw InvalidGeography(fmt::format("demand has {} entries for {} zones", demand_.size(), dist_.rows()));
  for (Eigen::Index j = 0; j < demand_.size(); ++j)
    if (!(demand_[j] > 0.0) || !std::isfinite(demand_[j]))
      throw InvalidGeography(fmt::format("demand of zone {} must be strictly positive", j + 1));
  if (!(kappa_ > 0.0) || !std::isfinite(kappa_)) throw InvalidGeography("kappa must be strictly positive");
  // Q / kappa = 1.
  const double q = demand_.sum();
  kappa_scale_ = q / kappa_;
  kappa_ = q;
}

bool Geography::has_uniform_demand(double tol) const {
  return (demand_.array() - demand_.mean()).abs().maxCoeff() <= tol;
}

Geography build_ring(int zones) {
  if (zones < 2) throw InvalidGeography(fmt::format("ring needs at least 2 zones, got {}", zones));
  Adjacency adj(zones);
  for (int i = 0; i < zones; ++i) {
    for (int j : {(i + 1) % zones, (i + zones - 1) % zones})
      if (j != i && std::find(adj[i].begin(), adj[i].end(), j) == adj[i].end()) adj[i].push_back(j);
  }
  return Geography(LatticeKind::ring, zones, bfs_distances(adj), uniform_demand(zones), 1.0);
}

Geography build_square_torus(int n) {
  if (n < 2) throw InvalidGeography(fmt::format("square torus needs n >= 2, got {}", n));
  const auto adj = torus_adjacency(n, {{1, 0}, {-1, 0}, {0, 1}, {0, -1}});
  return Geography(LatticeKind::square_torus, n, bfs_distances(adj), uniform_demand(n * n), 1.0);
}

Geography build_tri_torus(int n) {
  if (n < 2) throw InvalidGeography(fmt::format("triangular torus needs n >= 2, got {}", n));
  // Axial coordinates: six neighbors per site.
  const auto adj = torus_adjacency(n, {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, -1}, {-1, 1}});
  return Geography(LatticeKind::tri_torus, n, bfs_distances(adj), uniform_demand(n * n), 1.0);
}

Geography geography_from_spec(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon != std::string_view::npos) {
    const std::string kind(spec.substr(0, colon));
    const std::string arg(spec.substr(colon + 1));
    if (kind == "ring" || kind == "square" || kind == "tri") {
      int n = 0;
      std::size_t used = 0;
      try {
        n = std::stoi(arg, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != arg.size() || arg.empty())
        throw ParseError(fmt::format("bad lattice size in geography spec '{}'", spec));
      if (kind == "ring") return build_ring(n);
      if (kind == "square") return build_square_torus(n);
      return build_tri_torus(n);
    }
  }
  return load_geography(std::filesystem::path(std::string(spec)));
}

Geography parse_geography(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("geography file is not valid JSON: {}", e.what()));
  }
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw ParseError("geography file needs a string field \"kind\"");
  const std::string kind = j["kind"];
  try {
    if (kind == "ring" || kind == "square" || kind == "tri") {
      if (!j.contains("n") || !j["n"].is_number_integer())
        throw ParseError("lattice geography needs an integer field \"n\"");
      const int n = j["n"];
      if (kind == "ring") return build_ring(n);
      if (kind == "square") return build_square_torus(n);
      return build_tri_torus(n);
    }
    if (kind != "custom") throw ParseError(fmt::format("unknown geography kind '{}'", kind));
    if (!j.contains("dist") || !j["dist"].is_array()) throw ParseError("custom geography needs \"dist\"");
    const auto& rows = j["dist"];
    const auto k = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd dist(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
      if (!rows[i].is_array() || static_cast<Eigen::Index>(rows[i].size()) != k)
        throw ParseError(fmt::format("dist row {} must have {} entries", i + 1, k));
      for (Eigen::Index c = 0; c < k; ++c) dist(i, c) = rows[i][c].get<double>();
    }
    Eigen::VectorXd demand;
    if (j.contains("demand")) {
      const auto& d = j["demand"];
      if (!d.is_array()) throw ParseError("\"demand\" must be an array");
      demand.resize(static_cast<Eigen::Index>(d.size()));
      for (std::size_t c = 0; c < d.size(); ++c) demand[static_cast<Eigen::Index>(c)] = d[c].get<double>();
    } else {
      demand = uniform_demand(static_cast<int>(k));
    }
    const double kappa = j.value("kappa", 1.0);
    return Geography(LatticeKind::custom, 0, std::move(dist), std::move(demand), kappa);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("malformed geography file: {}", e.what()));
  }
}

Geography load_geography(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open geography file '{}'", path.string()));
  return parse_geography(in);
}

std::string geography_to_json(const Geography& geo) {
  // Written as a custom geography so the matrices round-trip exactly.
  const int k = geo.zones();
  std::ostringstream os;
  os << std::setprecision(17);
  os << "{\n  \"kind\": \"custom\",\n  \"source\": \"" << to_string(geo.kind()) << "\",\n  \"n\": "
     << geo.side() << ",\n  \"dist\": [\n";
  for (int i = 0; i < k; ++i) {
    os << "    [";
    for (int c = 0; c < k; ++c) os << (c ? ", " : "") << geo.dist()(i, c);
    os << "]" << (i + 1 < k ? "," : "") << "\n";
  }
  os << "  ],\n  \"demand\": [";
  for (int c = 0; c < k; ++c) os << (c ? ", " : "") << geo.demand()[c];
  os << "],\n  \"kappa\": " << geo.kappa() << "\n}\n";
  return os.str();
}

void save_geography(const Geography& geo, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  out << geography_to_json(geo);
}

ModelParams ModelParams::from_beta(double alpha, double beta) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error(fmt::format("alpha must be positive, got {}", alpha));
  if (!(beta > 0.0) || !std::isfinite(beta)) throw Error(fmt::format("beta must be positive, got {}", beta));
  return ModelParams(alpha, beta, std::exp(-beta));
}

ModelParams ModelParams::from_phi(double alpha, double phi) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error(fmt::format("alpha must be positive, got {}", alpha));
  if (!(phi > 0.0 && phi < 1.0)) throw Error(fmt::format("phi must lie in (0, 1), got {}", phi));
  return ModelParams(alpha, -std::log(phi), phi);
}

ProximityMatrix proximity(const Geography& geo, const ModelParams& params) {
  const double phi = params.phi();
  return ProximityMatrix(geo.dist().unaryExpr([phi](double d) { return std::pow(phi, d); }));
}

}  // namespace hwretail
