#pragma once

#include "netconn/constraint_eval.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace netconn {

struct CostEval {
  double value = 0.0;
  Eigen::VectorXd grad;
};

using CostFunction = std::function<CostEval(const Eigen::VectorXd&)>;
using ConstraintFunction = std::function<ConstraintEval(const Eigen::VectorXd&)>;

struct SaddleParams {
  double step = 5e-2;
  int max_iters = 20000;
  double kkt_tol = 1e-5;
  bool warm_start = true;
  /// Entries that carry a matrix-inequality form get a positive semidefinite
  /// dual matrix instead of a scalar multiplier. The Lagrangian is then
  /// smooth in u even where a minimum eigenvalue is repeated. With this off,
  /// every entry uses a scalar dual and its supplied subgradient.
  bool matrix_duals = true;

  void validate() const;
};

struct WarmStart {
  Eigen::VectorXd u;
  Eigen::VectorXd duals;
  std::vector<Eigen::MatrixXd> matrix_duals;
};

struct SolveResult {
  Eigen::VectorXd u_star;
  /// One multiplier per constraint entry; the trace of the dual matrix for
  /// entries solved in matrix form.
  Eigen::VectorXd duals;
  std::vector<Eigen::MatrixXd> matrix_duals;  // per matrix form, in order
  double kkt_residual = 0.0;
  int iters = 0;
  bool converged = false;
};

class SolverDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Stacks every constraint producer's entries at u.
ConstraintEval evaluate_constraints(std::span<const ConstraintFunction> constraints,
                                    const Eigen::VectorXd& u);

/// max(|grad J + G^T d|_inf, max_j [g_j]_+, max_j |d_j g_j|)
double kkt_residual(const Eigen::VectorXd& u, const Eigen::VectorXd& duals, const CostFunction& cost,
                    std::span<const ConstraintFunction> constraints);

double kkt_residual(const CostEval& cost, const ConstraintEval& g, const Eigen::VectorXd& duals);

/// Residual with dual matrices for the entries in `g.matrix_forms`:
/// stationarity uses d<Lambda, S(u)>/du, complementarity |<Lambda, S(u)>|.
/// Scalar entries use `duals` as above.
double kkt_residual(const CostEval& cost, const ConstraintEval& g, const Eigen::VectorXd& duals,
                    const std::vector<Eigen::MatrixXd>& matrix_duals);

/// Nearest positive semidefinite matrix in Frobenius norm.
Eigen::MatrixXd project_psd(const Eigen::MatrixXd& symmetric);

/// Explicit-Euler projected saddle-point dynamics for
///   min_u J(u)  s.t.  g(u) <= 0
/// Primal gradient descent on the Lagrangian, dual ascent projected onto the
/// nonnegative orthant (or the semidefinite cone for matrix-form entries).
/// Starts from `init` when given (duals whose shape no longer matches are
/// reset), else from u = 0 and zero duals.
///
/// Throws SolverDiverged on a non-finite iterate; running out of iterations
/// is reported through `converged`.
SolveResult saddle_solve(Eigen::Index components, const CostFunction& cost,
                         std::span<const ConstraintFunction> constraints,
                         const SaddleParams& params, const std::optional<WarmStart>& init = {});

}  // namespace netconn
