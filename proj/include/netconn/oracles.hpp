#pragma once

#include "netconn/spectrum.hpp"

#include <Eigen/Dense>

#include <functional>
#include <random>
#include <vector>

namespace netconn {

/// <sum_k weights_k v_k v_k^T, rate> for unit vectors v_k.
double convex_hull_pairing(const Eigen::MatrixXd& rate, const std::vector<Eigen::VectorXd>& vectors,
                           const Eigen::VectorXd& weights);

/// Monte-Carlo upper estimate of mu_[2:m]: the smallest pairing of the
/// Laplacian rate along u with random convex combinations of v v^T, v a unit
/// vector in the span of eigenvectors 2..m. Returns the running minimum after
/// each budget in `checkpoints` (ascending); the last one is the sample count.
std::vector<double> oracle_convex_hull_min(const NetworkAnalysis& a,
                                           const Eigen::Ref<const Eigen::VectorXd>& u, int m,
                                           const std::vector<int>& checkpoints,
                                           std::mt19937_64& rng);

double oracle_convex_hull_min(const NetworkAnalysis& a, const Eigen::Ref<const Eigen::VectorXd>& u,
                              int m, int samples, std::mt19937_64& rng);

/// min 1/2 u^T H u + c^T u  s.t.  A u <= b, with H positive definite.
struct QuadraticProgram {
  Eigen::MatrixXd hessian;
  Eigen::VectorXd linear;
  Eigen::MatrixXd a;
  Eigen::VectorXd b;

  double value(const Eigen::VectorXd& u) const { return 0.5 * u.dot(hessian * u) + linear.dot(u); }
};

struct QpSolution {
  Eigen::VectorXd u;
  Eigen::VectorXd duals;
  double value = 0.0;
};

/// Enumerates every active set, solves its equality-constrained KKT system,
/// and keeps the primal-dual feasible point of least cost. Exponential in the
/// constraint count; meant for a handful of rows. Throws if none qualifies.
QpSolution brute_force_qp(const QuadraticProgram& qp);

/// Central differences, one component at a time.
Eigen::VectorXd central_difference_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                            const Eigen::VectorXd& x, double h);

/// Uniform planar positions in a square of side `spread`, redrawn until
/// lambda_2 >= min_lambda2.
NetworkState random_connected_state(std::mt19937_64& rng, int robots, const ProximityConfig& cfg,
                                    double spread, double min_lambda2 = 1e-3);

Eigen::VectorXd random_normal(std::mt19937_64& rng, Eigen::Index size);

}  // namespace netconn
