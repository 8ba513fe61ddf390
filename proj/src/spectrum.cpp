#include "netconn/spectrum.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace netconn {

namespace {

void fix_signs(Eigen::MatrixXd& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
      const double value = vectors(r, c);
      if (std::abs(value) > 1e-12) {
        if (value < 0.0) vectors.col(c) *= -1.0;
        break;
      }
    }
  }
}

Spectrum decompose_unchecked(const Eigen::Ref<const Eigen::MatrixXd>& symmetric) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    // Eigen's tridiagonal QR gives up after 30 sweeps per row.
    throw std::runtime_error("spectral_decompose: QR iteration did not converge within " +
                             std::to_string(30 * symmetric.rows()) + " sweeps on a " +
                             std::to_string(symmetric.rows()) + "x" +
                             std::to_string(symmetric.cols()) + " matrix");
  }
  Spectrum s{solver.eigenvalues(), solver.eigenvectors()};
  fix_signs(s.eigenvectors);
  return s;
}

MergedBoundEval bound_from_projection(const GraphEval& graph, const Eigen::MatrixXd& basis,
                                      Eigen::MatrixXd z) {
  MergedBoundEval out;
  const Spectrum zs = decompose_unchecked(z);
  out.z = std::move(z);
  out.mu = zs.eigenvalues(0);
  out.xi = zs.eigenvectors.col(0);
  out.gap = zs.size() > 1 ? zs.eigenvalues(1) - zs.eigenvalues(0)
                          : std::numeric_limits<double>::infinity();
  const Eigen::VectorXd lifted = basis * out.xi;
  out.grad_u.resize(static_cast<Eigen::Index>(graph.jacobians.size()));
  for (std::size_t i = 0; i < graph.jacobians.size(); ++i) {
    out.grad_u(static_cast<Eigen::Index>(i)) = graph.jacobians[i].quadratic_form(lifted);
  }
  return out;
}

void check_input(const NetworkAnalysis& analysis, const Eigen::Ref<const Eigen::VectorXd>& u) {
  if (u.size() != analysis.components()) {
    throw std::invalid_argument("merged bound: input has length " + std::to_string(u.size()) +
                                ", state has " + std::to_string(analysis.components()) +
                                " components");
  }
}

}  // namespace

Spectrum spectral_decompose(const Eigen::Ref<const Eigen::MatrixXd>& symmetric) {
  if (symmetric.rows() != symmetric.cols()) {
    throw std::invalid_argument("spectral_decompose: matrix is not square");
  }
  const double asym = (symmetric - symmetric.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= 1e-10)) {
    throw std::invalid_argument("spectral_decompose: matrix is not symmetric (max |L - L^T| = " +
                                std::to_string(asym) + ")");
  }
  return decompose_unchecked(symmetric);
}

double NetworkAnalysis::multiplicity_tolerance() const {
  return 1e-8 * std::max(1.0, graph.laplacian.norm());
}

NetworkAnalysis analyze(const NetworkState& x, const ProximityConfig& cfg) {
  NetworkAnalysis a;
  a.graph = evaluate_graph(x, cfg);
  a.spectrum = spectral_decompose(a.graph.laplacian);
  a.reduced_jacobians =
      projected_jacobians(a.graph, a.spectrum.eigenvectors.rightCols(a.robots() - 1));
  return a;
}

std::vector<Eigen::MatrixXd> projected_jacobians(const GraphEval& graph,
                                                 const Eigen::Ref<const Eigen::MatrixXd>& basis) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(graph.jacobians.size());
  for (const ComponentJacobian& j : graph.jacobians) out.push_back(j.project(basis));
  return out;
}

double algebraic_connectivity(const NetworkState& x, const ProximityConfig& cfg) {
  const GraphEval g = evaluate_graph(x, cfg);
  return spectral_decompose(g.laplacian).lambda(2);
}

MergedBasis merged_basis(const Spectrum& spectrum, int m) {
  if (m < 2 || m > spectrum.size()) {
    throw std::out_of_range("merged_basis: m = " + std::to_string(m) + " outside [2, " +
                            std::to_string(spectrum.size()) + "]");
  }
  return MergedBasis{m, spectrum.eigenvectors.middleCols(1, m - 1)};
}

MergedBoundEval block_lower_bound(const NetworkAnalysis& analysis,
                                  const Eigen::Ref<const Eigen::VectorXd>& u, int first,
                                  int last) {
  check_input(analysis, u);
  const int n = analysis.robots();
  if (first < 1 || last > n || first > last) {
    throw std::out_of_range("block_lower_bound: block [" + std::to_string(first) + ", " +
                            std::to_string(last) + "] outside [1, " + std::to_string(n) + "]");
  }
  const Eigen::MatrixXd basis = analysis.spectrum.eigenvectors.middleCols(first - 1, last - first + 1);
  const Eigen::MatrixXd rate = analysis.graph.laplacian_rate(u);
  Eigen::MatrixXd z = basis.transpose() * rate * basis;
  z = (0.5 * (z + z.transpose())).eval();
  return bound_from_projection(analysis.graph, basis, std::move(z));
}

MergedBoundEval merged_lower_bound(const NetworkAnalysis& analysis,
                                   const Eigen::Ref<const Eigen::VectorXd>& u, int m) {
  if (m < 2 || m > analysis.robots()) {
    throw std::out_of_range("merged_lower_bound: m = " + std::to_string(m) + " outside [2, " +
                            std::to_string(analysis.robots()) + "]");
  }
  return block_lower_bound(analysis, u, 2, m);
}

MergedBoundEval merged_lower_bound(const NetworkState& x, const Eigen::Ref<const Eigen::VectorXd>& u,
                                   int m, const ProximityConfig& cfg) {
  return merged_lower_bound(analyze(x, cfg), u, m);
}

std::vector<MergedBoundEval> merged_lower_bounds(const NetworkAnalysis& analysis,
                                                 const Eigen::Ref<const Eigen::VectorXd>& u) {
  check_input(analysis, u);
  const int n = analysis.robots();
  const Eigen::MatrixXd basis = analysis.spectrum.eigenvectors.rightCols(n - 1);
  const Eigen::MatrixXd rate = analysis.graph.laplacian_rate(u);
  Eigen::MatrixXd full = basis.transpose() * rate * basis;
  full = (0.5 * (full + full.transpose())).eval();

  std::vector<MergedBoundEval> out;
  out.reserve(static_cast<std::size_t>(n - 1));
  for (int m = 2; m <= n; ++m) {
    out.push_back(bound_from_projection(analysis.graph, basis.leftCols(m - 1),
                                        full.topLeftCorner(m - 1, m - 1)));
  }
  return out;
}

std::pair<int, int> eigenvalue_block(const NetworkAnalysis& analysis, int m) {
  const int n = analysis.robots();
  if (m < 1 || m > n) {
    throw std::out_of_range("eigenvalue_block: m = " + std::to_string(m) + " outside [1, " +
                            std::to_string(n) + "]");
  }
  const double tol = analysis.multiplicity_tolerance();
  const double target = analysis.lambda(m);
  int first = m;
  int last = m;
  while (first > 1 && std::abs(analysis.lambda(first - 1) - target) <= tol) --first;
  while (last < n && std::abs(analysis.lambda(last + 1) - target) <= tol) ++last;
  return {first, last};
}

MergedBoundEval lie_min_rate(const NetworkAnalysis& analysis,
                             const Eigen::Ref<const Eigen::VectorXd>& u, int m) {
  const auto [first, last] = eigenvalue_block(analysis, m);
  return block_lower_bound(analysis, u, first, last);
}

}  // namespace netconn
