#pragma once

#include <vector>

#include <Eigen/Core>

#include "hwretail/geometry.hpp"

namespace hwretail {

/// Retailer mass per zone.
using State = Eigen::VectorXd;

/// Tolerance for membership of the simplex sum(x) = Q / kappa = 1.
inline constexpr double kSimplexTol = 1e-9;

bool on_simplex(const State& x, double tol = kSimplexTol);
std::vector<int> support_of(const State& x);

/// Spending flows V(i, j): value spent in zone i by consumers from zone j.
Eigen::MatrixXd flow_matrix(const Economy& eco, const State& x);

/// Profit per retailer by zone. Empty zones use the continuous extension of
/// x^(alpha-1): 0 for alpha > 1, 1 for alpha = 1, +infinity for alpha < 1.
Eigen::VectorXd payoff(const Economy& eco, const State& x);

struct PotentialValue {
  double f;  ///< potential
  double g;  ///< accessibility term; f = g - kappa * sum(x)
};

PotentialValue potential(const Economy& eco, const State& x);

/// Gradient of the potential, which is the payoff vector.
Eigen::VectorXd potential_gradient(const Economy& eco, const State& x);

/// Second derivatives of the potential restricted to the populated zones.
struct FaceHessian {
  std::vector<int> support;
  Eigen::MatrixXd values;  ///< |support| x |support|
};

FaceHessian potential_hessian(const Economy& eco, const State& x);

/// Orthonormal basis (M x (M-1)) of {v : sum(v) = 0}, from a Householder reflector.
Eigen::MatrixXd simplex_tangent_basis(int m);

/// Infinity norm of the complementarity violations |x_i pi_i|, max(pi_i, 0), max(-x_i, 0).
double equilibrium_residual(const Economy& eco, const State& x);

}  // namespace hwretail
