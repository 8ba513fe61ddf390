#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace netconn {

/// Stacked robot positions x = [x_1^T, ..., x_n^T]^T.
///
/// Robot r owns the contiguous block of `dims[r]` components starting at
/// `offset(r)`. Construction validates the layout and rejects non-finite data.
class NetworkState {
 public:
  NetworkState() = default;
  NetworkState(Eigen::VectorXd positions, std::vector<int> dims);

  /// Every robot in the same ambient dimension.
  static NetworkState uniform(Eigen::VectorXd positions, int dim);

  const Eigen::VectorXd& positions() const { return positions_; }
  const std::vector<int>& dims() const { return dims_; }
  int robots() const { return static_cast<int>(dims_.size()); }
  int size() const { return static_cast<int>(positions_.size()); }

  int offset(int robot) const { return offsets_[robot]; }
  int dim(int robot) const { return dims_[robot]; }
  /// Robot that owns scalar component `component`.
  int owner(int component) const { return owners_[component]; }

  Eigen::VectorXd robot(int r) const { return positions_.segment(offsets_[r], dims_[r]); }

  /// Same layout, new positions.
  NetworkState with_positions(Eigen::VectorXd positions) const;

 private:
  Eigen::VectorXd positions_;
  std::vector<int> dims_;
  std::vector<int> offsets_;
  std::vector<int> owners_;
};

struct ProximityConfig {
  double range = 2.0;   // edge cutoff R
  double sigma = 1.0;   // Gaussian decay scale
  double taper = 0.5;   // width of the C1 cutoff band, 0 < taper < range

  void validate() const;
};

/// Gaussian weight with a cubic-smoothstep cutoff; C1 on [0, inf).
double edge_weight(double d, const ProximityConfig& cfg);
double edge_weight_derivative(double d, const ProximityConfig& cfg);

/// dL/dx_i for a single scalar component i owned by robot p.
///
/// Only edges incident to p depend on x_i, so
///   dL/dx_i = sum_q dA_pq/dx_i (e_p - e_q)(e_p - e_q)^T
/// and the matrix is fully described by p and the n-vector of edge
/// derivatives (entry p is zero).
struct ComponentJacobian {
  int robot = 0;
  Eigen::VectorXd edge_rates;

  Eigen::MatrixXd dense() const;
  /// v^T (dL/dx_i) v without forming the matrix.
  double quadratic_form(const Eigen::Ref<const Eigen::VectorXd>& v) const;
  /// V^T (dL/dx_i) V for a tall basis V.
  Eigen::MatrixXd project(const Eigen::Ref<const Eigen::MatrixXd>& basis) const;
  /// target += scale * dL/dx_i
  void accumulate(Eigen::Ref<Eigen::MatrixXd> target, double scale) const;
};

struct GraphEval {
  Eigen::MatrixXd adjacency;
  Eigen::MatrixXd laplacian;
  std::vector<ComponentJacobian> jacobians;  // one per scalar component of x

  int robots() const { return static_cast<int>(laplacian.rows()); }
  /// sum_i (dL/dx_i) u_i, the rate of change of L along u.
  Eigen::MatrixXd laplacian_rate(const Eigen::Ref<const Eigen::VectorXd>& u) const;
};

GraphEval evaluate_graph(const NetworkState& x, const ProximityConfig& cfg);

}  // namespace netconn
