#include "hwretail/model.hpp"

#include <cmath>
#include <limits>

#include "hwretail/error.hpp"

namespace hwretail {

namespace {

void require_populated(const State& x, int zones) {
  if (x.size() != zones) throw DegenerateState("state length does not match the zone count");
  if (!(x.maxCoeff() > 0.0)) throw DegenerateState("state has no populated zone");
}

// Attractiveness x_k^alpha with 0^alpha = 0.
Eigen::VectorXd attractiveness(const State& x, double alpha) {
  return x.unaryExpr([alpha](double v) { return v > 0.0 ? std::pow(v, alpha) : 0.0; });
}

// S_j = sum_k x_k^alpha phi_jk.
Eigen::VectorXd accessibility(const Economy& eco, const Eigen::VectorXd& attract) {
  return eco.prox.values() * attract;
}

}  // namespace

bool on_simplex(const State& x, double tol) {
  return x.size() > 0 && x.minCoeff() >= 0.0 && std::abs(x.sum() - 1.0) <= tol;
}

std::vector<int> support_of(const State& x) {
  std::vector<int> s;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x[i] > 0.0) s.push_back(static_cast<int>(i));
  return s;
}

Eigen::MatrixXd flow_matrix(const Economy& eco, const State& x) {
  require_populated(x, eco.geo.zones());
  const Eigen::VectorXd a = attractiveness(x, eco.params.alpha());
  const Eigen::VectorXd s = accessibility(eco, a);
  const auto& phi = eco.prox.values();
  const Eigen::VectorXd& q = eco.geo.demand();
  const int k = eco.geo.zones();
  Eigen::MatrixXd v(k, k);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < k; ++i) v(i, j) = a[i] * phi(j, i) / s[j] * q[j];
  return v;
}

Eigen::VectorXd payoff(const Economy& eco, const State& x) {
  require_populated(x, eco.geo.zones());
  const double alpha = eco.params.alpha();
  const Eigen::VectorXd a = attractiveness(x, alpha);
  const Eigen::VectorXd s = accessibility(eco, a);
  // w_j = Q_j / S_j; revenue share sum_j phi_ji w_j.
  const Eigen::VectorXd w = eco.geo.demand().cwiseQuotient(s);
  const Eigen::VectorXd market = eco.prox.values().transpose() * w;
  const int k = eco.geo.zones();
  Eigen::VectorXd pi(k);
  for (int i = 0; i < k; ++i) {
    double scale;
    if (x[i] > 0.0)
      scale = std::pow(x[i], alpha - 1.0);
    else if (alpha > 1.0)
      scale = 0.0;
    else if (alpha == 1.0)
      scale = 1.0;
    else
      scale = std::numeric_limits<double>::infinity();
    pi[i] = scale * market[i] - eco.geo.kappa();
  }
  return pi;
}

PotentialValue potential(const Economy& eco, const State& x) {
  require_populated(x, eco.geo.zones());
  const double alpha = eco.params.alpha();
  const Eigen::VectorXd s = accessibility(eco, attractiveness(x, alpha));
  const double g = eco.geo.demand().dot(s.array().log().matrix()) / alpha;
  return {g - eco.geo.kappa() * x.sum(), g};
}

Eigen::VectorXd potential_gradient(const Economy& eco, const State& x) { return payoff(eco, x); }

FaceHessian potential_hessian(const Economy& eco, const State& x) {
  require_populated(x, eco.geo.zones());
  const double alpha = eco.params.alpha();
  FaceHessian h;
  h.support = support_of(x);
  const auto m = static_cast<Eigen::Index>(h.support.size());
  const Eigen::VectorXd s = accessibility(eco, attractiveness(x, alpha));
  const Eigen::VectorXd w = eco.geo.demand().cwiseQuotient(s);
  const auto& phi = eco.prox.values();
  const int k = eco.geo.zones();

  // d2f/dx_i dx_l = delta_il (alpha-1) x_i^(alpha-2) sum_j Q_j phi_ji / S_j
  //               - alpha sum_j Q_j x_i^(alpha-1) phi_ji x_l^(alpha-1) phi_jl / S_j^2
  Eigen::MatrixXd a(k, m);  // a(j, r) = x_r^(alpha-1) phi_j,r for r in support
  for (Eigen::Index r = 0; r < m; ++r) {
    const int i = h.support[static_cast<std::size_t>(r)];
    a.col(r) = std::pow(x[i], alpha - 1.0) * phi.col(i);
  }
  const Eigen::VectorXd wq = eco.geo.demand().cwiseQuotient(s.cwiseProduct(s));
  h.values = -alpha * a.transpose() * wq.asDiagonal() * a;
  for (Eigen::Index r = 0; r < m; ++r) {
    const int i = h.support[static_cast<std::size_t>(r)];
    h.values(r, r) += (alpha - 1.0) * std::pow(x[i], alpha - 2.0) * phi.col(i).dot(w);
  }
  return h;
}

Eigen::MatrixXd simplex_tangent_basis(int m) {
  if (m < 2) return Eigen::MatrixXd(m, 0);
  // Reflector H with H e_1 = 1/sqrt(m); its other columns span the sum-zero subspace.
  Eigen::VectorXd u = Eigen::VectorXd::Constant(m, -1.0 / std::sqrt(static_cast<double>(m)));
  u[0] += 1.0;
  const Eigen::MatrixXd reflector =
      Eigen::MatrixXd::Identity(m, m) - 2.0 * u * u.transpose() / u.squaredNorm();
  return reflector.rightCols(m - 1);
}

double equilibrium_residual(const Economy& eco, const State& x) {
  const Eigen::VectorXd pi = payoff(eco, x);
  double r = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] != 0.0) r = std::max(r, std::abs(x[i] * pi[i]));
    r = std::max(r, std::max(pi[i], 0.0));
    r = std::max(r, std::max(-x[i], 0.0));
  }
  return r;
}

}  // namespace hwretail
