#pragma once

#include "netconn/graph.hpp"

#include <Eigen/Dense>

namespace netconn {

/// Ascending eigenvalues with an orthonormal eigenvector matrix (column k
/// pairs with eigenvalue k). Each column's first component above 1e-12 in
/// magnitude is positive.
struct Spectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;

  int size() const { return static_cast<int>(eigenvalues.size()); }
  /// 1-based accessor: lambda(2) is the algebraic connectivity.
  double lambda(int m) const { return eigenvalues(m - 1); }
};

Spectrum spectral_decompose(const Eigen::Ref<const Eigen::MatrixXd>& symmetric);

/// Everything at a fixed state that the merged bounds need: the graph with
/// its Laplacian derivatives and the Laplacian spectrum.
struct NetworkAnalysis {
  GraphEval graph;
  Spectrum spectrum;
  /// V^T (dL/dx_i) V for V = eigenvectors 2..n; Z_m(u) is the leading
  /// (m-1)x(m-1) block of sum_i u_i * reduced_jacobians[i].
  std::vector<Eigen::MatrixXd> reduced_jacobians;

  int robots() const { return graph.robots(); }
  int components() const { return static_cast<int>(graph.jacobians.size()); }
  double lambda(int m) const { return spectrum.lambda(m); }
  /// Eigenvalue grouping tolerance, 1e-8 * max(1, ||L||_F).
  double multiplicity_tolerance() const;
};

NetworkAnalysis analyze(const NetworkState& x, const ProximityConfig& cfg);

/// basis^T (dL/dx_i) basis for every component i.
std::vector<Eigen::MatrixXd> projected_jacobians(const GraphEval& graph,
                                                 const Eigen::Ref<const Eigen::MatrixXd>& basis);

double algebraic_connectivity(const NetworkState& x, const ProximityConfig& cfg);

struct MergedBasis {
  int m = 2;
  Eigen::MatrixXd basis;  // n x (m-1), eigenvectors of lambda_2..lambda_m
};

MergedBasis merged_basis(const Spectrum& spectrum, int m);

struct MergedBoundEval {
  Eigen::MatrixXd z;      // Z_m = V^T (sum_i dL/dx_i u_i) V
  double mu = 0.0;        // lambda_min(Z_m)
  Eigen::VectorXd xi;     // unit eigenvector of lambda_min(Z_m)
  Eigen::VectorXd grad_u; // xi^T V^T (dL/dx_i) V xi for each component i
  /// Distance from lambda_min(Z_m) to the next eigenvalue of Z_m; infinity
  /// when Z_m is 1x1. mu is differentiable in u where this is positive.
  double gap = 0.0;
};

/// Merged lower bound over the eigenspaces of lambda_2..lambda_m (1-based).
MergedBoundEval merged_lower_bound(const NetworkAnalysis& analysis,
                                   const Eigen::Ref<const Eigen::VectorXd>& u, int m);

MergedBoundEval merged_lower_bound(const NetworkState& x, const Eigen::Ref<const Eigen::VectorXd>& u,
                                   int m, const ProximityConfig& cfg);

/// All merged bounds m = 2..n in one pass; element k holds m = k + 2. The
/// Laplacian rate is projected once and each Z_m is a leading block.
std::vector<MergedBoundEval> merged_lower_bounds(const NetworkAnalysis& analysis,
                                                 const Eigen::Ref<const Eigen::VectorXd>& u);

/// Same construction over an arbitrary contiguous block of eigenvector
/// columns [first, last] (1-based, inclusive).
MergedBoundEval block_lower_bound(const NetworkAnalysis& analysis,
                                  const Eigen::Ref<const Eigen::VectorXd>& u, int first, int last);

/// 1-based index range of eigenvalues equal to lambda_m within the
/// multiplicity tolerance.
std::pair<int, int> eigenvalue_block(const NetworkAnalysis& analysis, int m);

/// Worst-case rate of change of lambda_m along u: the minimum of the
/// quadratic form over the eigenspace of lambda_m alone. Discontinuous in x
/// wherever the multiplicity of lambda_m changes.
MergedBoundEval lie_min_rate(const NetworkAnalysis& analysis,
                             const Eigen::Ref<const Eigen::VectorXd>& u, int m);

}  // namespace netconn
