#include "netconn/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace netconn {

void SaddleParams::validate() const {
  if (!(step > 0.0) || !(kkt_tol > 0.0) || max_iters < 1) {
    throw std::invalid_argument("SaddleParams: require step > 0, kkt_tol > 0, max_iters >= 1");
  }
}

ConstraintEval evaluate_constraints(std::span<const ConstraintFunction> constraints,
                                    const Eigen::VectorXd& u) {
  if (constraints.size() == 1) return constraints.front()(u);
  ConstraintEval all = ConstraintEval::empty(u.size());
  for (const auto& c : constraints) all.append(c(u));
  return all;
}

Eigen::MatrixXd project_psd(const Eigen::MatrixXd& symmetric) {
  if (symmetric.rows() == 1) return symmetric.cwiseMax(0.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetric);
  const Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose();
}

namespace {

// Lagrangian gradient in u; marks which entries are carried by a dual matrix.
Eigen::VectorXd stationarity(const CostEval& cost, const ConstraintEval& g,
                             const Eigen::VectorXd& duals,
                             const std::vector<Eigen::MatrixXd>& matrix_duals,
                             std::vector<bool>& in_matrix_form) {
  in_matrix_form.assign(static_cast<std::size_t>(g.size()), false);
  Eigen::VectorXd out = cost.grad;
  if (!matrix_duals.empty()) {
    for (std::size_t f = 0; f < g.matrix_forms.size(); ++f) {
      const MatrixInequality& form = g.matrix_forms[f];
      out += form.pairing_gradient(matrix_duals[f]);
      in_matrix_form[static_cast<std::size_t>(form.entry)] = true;
    }
  }
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    if (!in_matrix_form[static_cast<std::size_t>(j)] && duals(j) != 0.0) {
      out += duals(j) * g.grad_u.row(j).transpose();
    }
  }
  return out;
}

double residual_from(const Eigen::VectorXd& stat, const ConstraintEval& g,
                     const Eigen::VectorXd& duals, const std::vector<Eigen::MatrixXd>& matrix_duals,
                     const std::vector<bool>& in_matrix_form) {
  double r = stat.size() > 0 ? stat.cwiseAbs().maxCoeff() : 0.0;
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    r = std::max(r, std::max(0.0, g.values(j)));
    if (!in_matrix_form[static_cast<std::size_t>(j)]) {
      r = std::max(r, std::abs(duals(j) * g.values(j)));
    }
  }
  if (!matrix_duals.empty()) {
    for (std::size_t f = 0; f < g.matrix_forms.size(); ++f) {
      const double pairing = matrix_duals[f].cwiseProduct(g.matrix_forms[f].value).sum();
      r = std::max(r, std::abs(pairing));
    }
  }
  return r;
}

bool shapes_match(const std::vector<Eigen::MatrixXd>& duals, const ConstraintEval& g) {
  if (duals.size() != g.matrix_forms.size()) return false;
  for (std::size_t f = 0; f < duals.size(); ++f) {
    if (duals[f].rows() != g.matrix_forms[f].value.rows()) return false;
  }
  return true;
}

}  // namespace

double kkt_residual(const CostEval& cost, const ConstraintEval& g, const Eigen::VectorXd& duals,
                    const std::vector<Eigen::MatrixXd>& matrix_duals) {
  if (duals.size() != g.size()) {
    throw std::invalid_argument("kkt_residual: " + std::to_string(duals.size()) + " duals for " +
                                std::to_string(g.size()) + " constraint entries");
  }
  if (!matrix_duals.empty() && !shapes_match(matrix_duals, g)) {
    throw std::invalid_argument("kkt_residual: dual matrices do not match the matrix forms");
  }
  std::vector<bool> in_matrix_form;
  const Eigen::VectorXd stat = stationarity(cost, g, duals, matrix_duals, in_matrix_form);
  return residual_from(stat, g, duals, matrix_duals, in_matrix_form);
}

double kkt_residual(const CostEval& cost, const ConstraintEval& g, const Eigen::VectorXd& duals) {
  return kkt_residual(cost, g, duals, {});
}

double kkt_residual(const Eigen::VectorXd& u, const Eigen::VectorXd& duals, const CostFunction& cost,
                    std::span<const ConstraintFunction> constraints) {
  return kkt_residual(cost(u), evaluate_constraints(constraints, u), duals);
}

SolveResult saddle_solve(Eigen::Index components, const CostFunction& cost,
                         std::span<const ConstraintFunction> constraints,
                         const SaddleParams& params, const std::optional<WarmStart>& init) {
  params.validate();
  SolveResult res;
  res.u_star = Eigen::VectorXd::Zero(components);
  if (init && init->u.size() == components) res.u_star = init->u;

  ConstraintEval g = evaluate_constraints(constraints, res.u_star);
  res.duals = Eigen::VectorXd::Zero(g.size());
  if (init && init->duals.size() == g.size()) res.duals = init->duals.cwiseMax(0.0);

  const bool use_matrices = params.matrix_duals && !g.matrix_forms.empty();
  if (use_matrices) {
    if (init && shapes_match(init->matrix_duals, g)) {
      for (const Eigen::MatrixXd& m : init->matrix_duals) res.matrix_duals.push_back(project_psd(m));
    } else {
      for (const MatrixInequality& form : g.matrix_forms) {
        const auto k = form.value.rows();
        res.matrix_duals.push_back(Eigen::MatrixXd::Zero(k, k));
      }
    }
  }

  const double eta = params.step;
  std::vector<bool> in_matrix_form;
  for (res.iters = 0;; ++res.iters) {
    const Eigen::VectorXd stat =
        stationarity(cost(res.u_star), g, res.duals, res.matrix_duals, in_matrix_form);
    res.kkt_residual = residual_from(stat, g, res.duals, res.matrix_duals, in_matrix_form);
    if (res.kkt_residual <= params.kkt_tol) {
      res.converged = true;
      break;
    }
    if (res.iters >= params.max_iters) break;

    res.u_star -= eta * stat;
    for (Eigen::Index j = 0; j < g.size(); ++j) {
      if (!in_matrix_form[static_cast<std::size_t>(j)]) {
        res.duals(j) = std::max(0.0, res.duals(j) + eta * g.values(j));
      }
    }
    for (std::size_t f = 0; f < res.matrix_duals.size(); ++f) {
      res.matrix_duals[f] = project_psd(res.matrix_duals[f] + eta * g.matrix_forms[f].value);
    }
    if (!res.u_star.allFinite() || !res.duals.allFinite()) {
      throw SolverDiverged("saddle_solve: non-finite iterate after " +
                           std::to_string(res.iters + 1) + " steps (step size " +
                           std::to_string(eta) + " too large?)");
    }
    g = evaluate_constraints(constraints, res.u_star);
    if (g.size() != res.duals.size() ||
        (use_matrices && !shapes_match(res.matrix_duals, g))) {
      throw std::logic_error("saddle_solve: constraint structure changed between iterates");
    }
  }
  for (std::size_t f = 0; f < res.matrix_duals.size(); ++f) {
    res.duals(g.matrix_forms[f].entry) = res.matrix_duals[f].trace();
  }
  return res;
}

}  // namespace netconn
