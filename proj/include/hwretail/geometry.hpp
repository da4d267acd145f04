#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace hwretail {

enum class LatticeKind { ring, square_torus, tri_torus, custom };

std::string_view to_string(LatticeKind kind);

/// Exogenous environment: zones, shortest-path distances, demand and entry cost.
///
/// Construction validates that `dist` is a metric and that demand is strictly
/// positive, then rescales the entry cost so that total demand over kappa is one.
/// Zones are 0-based internally; files and reports use 1-based numbering.
class Geography {
 public:
  Geography(LatticeKind kind, int side, Eigen::MatrixXd dist, Eigen::VectorXd demand,
            double kappa);

  LatticeKind kind() const { return kind_; }
  /// Lattice side n (ring: K, custom: 0).
  int side() const { return side_; }
  int zones() const { return static_cast<int>(demand_.size()); }
  const Eigen::MatrixXd& dist() const { return dist_; }
  const Eigen::VectorXd& demand() const { return demand_; }
  double kappa() const { return kappa_; }
  /// Total demand Q (equals kappa after normalization).
  double total_demand() const { return demand_.sum(); }
  /// Factor applied to the input kappa during normalization (1 for builders).
  double kappa_scale() const { return kappa_scale_; }
  bool has_uniform_demand(double tol = 1e-14) const;
  bool is_lattice() const { return kind_ != LatticeKind::custom; }

 private:
  LatticeKind kind_;
  int side_;
  Eigen::MatrixXd dist_;
  Eigen::VectorXd demand_;
  double kappa_;
  double kappa_scale_ = 1.0;
};

Geography build_ring(int zones);
Geography build_square_torus(int n);
Geography build_tri_torus(int n);

/// Parses "ring:K", "square:n", "tri:n"; anything else is treated as a file path.
Geography geography_from_spec(std::string_view spec);

Geography load_geography(const std::filesystem::path& path);
Geography parse_geography(std::istream& in);
void save_geography(const Geography& geo, const std::filesystem::path& path);
std::string geography_to_json(const Geography& geo);

/// Structural parameters (alpha, beta); phi = exp(-beta) is kept alongside.
class ModelParams {
 public:
  static ModelParams from_beta(double alpha, double beta);
  static ModelParams from_phi(double alpha, double phi);

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double phi() const { return phi_; }

 private:
  ModelParams(double alpha, double beta, double phi) : alpha_(alpha), beta_(beta), phi_(phi) {}
  double alpha_;
  double beta_;
  double phi_;
};

/// values(i, j) = phi^dist(i, j).
class ProximityMatrix {
 public:
  explicit ProximityMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {}
  const Eigen::MatrixXd& values() const { return values_; }
  double operator()(int i, int j) const { return values_(i, j); }

 private:
  Eigen::MatrixXd values_;
};

ProximityMatrix proximity(const Geography& geo, const ModelParams& params);

/// Geography, parameters and the derived proximity matrix bundled for evaluation.
struct Economy {
  Economy(Geography g, ModelParams p) : geo(std::move(g)), params(p), prox(proximity(geo, params)) {}

  Geography geo;
  ModelParams params;
  ProximityMatrix prox;
};

}  // namespace hwretail
