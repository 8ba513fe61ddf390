#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace netconn {

/// Affine matrix inequality S(u) = S0 + sum_i u_i dS_i <= 0 (negative
/// semidefinite), attached to scalar entry `entry` whose value equals
/// lambda_max(S(u)).
struct MatrixInequality {
  Eigen::Index entry = 0;
  Eigen::MatrixXd value;                  // S(u) at the evaluation point
  std::vector<Eigen::MatrixXd> partials;  // dS/du_i, one per component

  /// d/du_i <W, S(u)> for a symmetric weight W.
  Eigen::VectorXd pairing_gradient(const Eigen::MatrixXd& weight) const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(partials.size()));
    for (std::size_t i = 0; i < partials.size(); ++i) {
      out(static_cast<Eigen::Index>(i)) = weight.cwiseProduct(partials[i]).sum();
    }
    return out;
  }
};

/// Inequalities in residual form: u is feasible iff every value is <= 0.
/// Row j of `grad_u` is the (sub)gradient of value j with respect to u.
/// Entries that come from a minimum eigenvalue may also carry their exact
/// matrix-inequality form in `matrix_forms`.
struct ConstraintEval {
  Eigen::VectorXd values;
  Eigen::MatrixXd grad_u;
  std::vector<std::string> labels;
  std::vector<MatrixInequality> matrix_forms;

  static ConstraintEval empty(Eigen::Index components) {
    return ConstraintEval{Eigen::VectorXd(0), Eigen::MatrixXd(0, components), {}, {}};
  }

  Eigen::Index size() const { return values.size(); }
  bool feasible(double tol = 0.0) const { return size() == 0 || values.maxCoeff() <= tol; }

  void append(double value, const Eigen::Ref<const Eigen::VectorXd>& grad, std::string label) {
    const Eigen::Index k = values.size();
    values.conservativeResize(k + 1);
    values(k) = value;
    grad_u.conservativeResize(k + 1, grad.size());
    grad_u.row(k) = grad.transpose();
    labels.push_back(std::move(label));
  }

  void append(const ConstraintEval& other) {
    const Eigen::Index shift = size();
    for (Eigen::Index j = 0; j < other.size(); ++j) {
      append(other.values(j), other.grad_u.row(j).transpose(),
             other.labels[static_cast<std::size_t>(j)]);
    }
    for (const MatrixInequality& m : other.matrix_forms) {
      matrix_forms.push_back(m);
      matrix_forms.back().entry += shift;
    }
  }
};

}  // namespace netconn
