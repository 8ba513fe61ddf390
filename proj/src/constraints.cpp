#include "netconn/constraints.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace netconn {

void BarrierParams::validate() const {
  if (!(epsilon > 0.0) || !(alpha_slope > 0.0)) {
    throw std::invalid_argument("BarrierParams: require epsilon > 0 and alpha_slope > 0");
  }
}

void PriorityTask::validate(const NetworkState& x) const {
  if (targets.size() != x.size()) {
    throw std::invalid_argument("PriorityTask: targets have length " +
                                std::to_string(targets.size()) + ", state has " +
                                std::to_string(x.size()));
  }
  if (!reached.empty() && static_cast<int>(reached.size()) != x.robots()) {
    throw std::invalid_argument("PriorityTask: reached flags do not match robot count");
  }
  if (prioritized < -1 || prioritized >= x.robots()) {
    throw std::invalid_argument("PriorityTask: prioritized robot out of range");
  }
  if (!(k_frac > 0.0 && k_frac < 1.0) || !(target_radius > 0.0) || !(v_nom > 0.0)) {
    throw std::invalid_argument(
        "PriorityTask: require 0 < k_frac < 1, target_radius > 0, v_nom > 0");
  }
}

namespace {

// -Z(u) - margin * I <= 0, the matrix form of -lambda_min(Z(u)) - margin <= 0.
MatrixInequality barrier_form(Eigen::Index entry, const std::vector<Eigen::MatrixXd>& projected,
                              const Eigen::MatrixXd& z, double margin) {
  const auto k = z.rows();
  MatrixInequality form;
  form.entry = entry;
  form.value = -z - margin * Eigen::MatrixXd::Identity(k, k);
  form.partials.reserve(projected.size());
  for (const Eigen::MatrixXd& p : projected) form.partials.push_back(-p.topLeftCorner(k, k));
  return form;
}

// Z_m partials for the full merged basis; analyses built by hand may lack them.
std::vector<Eigen::MatrixXd> reduced_jacobians(const NetworkAnalysis& a) {
  if (!a.reduced_jacobians.empty()) return a.reduced_jacobians;
  return projected_jacobians(a.graph, a.spectrum.eigenvectors.rightCols(a.robots() - 1));
}

}  // namespace

Eigen::VectorXd nominal_field(const NetworkState& x, const PriorityTask& task) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(x.size());
  for (int r = 0; r < x.robots(); ++r) {
    if (!task.reached.empty() && task.reached[static_cast<std::size_t>(r)]) continue;
    const Eigen::VectorXd error = task.targets.segment(x.offset(r), x.dim(r)) - x.robot(r);
    const double dist = error.norm();
    if (dist <= task.target_radius) continue;
    out.segment(x.offset(r), x.dim(r)) = task.v_nom * error / dist;
  }
  return out;
}

ConstraintEval eval_cm(const NetworkAnalysis& a, const Eigen::Ref<const Eigen::VectorXd>& u,
                       const BarrierParams& bp) {
  const auto [first, last] = eigenvalue_block(a, 2);
  const MergedBoundEval rate = block_lower_bound(a, u, first, last);
  const double margin = bp.alpha(a.lambda(2) - bp.epsilon);
  ConstraintEval out = ConstraintEval::empty(u.size());
  out.append(-rate.mu - margin, -rate.grad_u, "g_cm");
  const auto projected =
      projected_jacobians(a.graph, a.spectrum.eigenvectors.middleCols(first - 1, last - first + 1));
  out.matrix_forms.push_back(barrier_form(0, projected, rate.z, margin));
  return out;
}

ConstraintEval eval_str(const NetworkAnalysis& a, const Eigen::Ref<const Eigen::VectorXd>& u,
                        const BarrierParams& bp) {
  const MergedBoundEval bound = merged_lower_bound(a, u, a.robots());
  const double margin = bp.alpha(a.lambda(2) - bp.epsilon);
  ConstraintEval out = ConstraintEval::empty(u.size());
  out.append(-bound.mu - margin, -bound.grad_u, "g_str");
  out.matrix_forms.push_back(barrier_form(0, reduced_jacobians(a), bound.z, margin));
  return out;
}

ConstraintEval eval_agg(const NetworkAnalysis& a, const Eigen::Ref<const Eigen::VectorXd>& u,
                        const BarrierParams& bp) {
  const std::vector<MergedBoundEval> bounds = merged_lower_bounds(a, u);
  const std::vector<Eigen::MatrixXd> projected = reduced_jacobians(a);
  ConstraintEval out = ConstraintEval::empty(u.size());
  for (int m = 2; m <= a.robots(); ++m) {
    const MergedBoundEval& b = bounds[static_cast<std::size_t>(m - 2)];
    const double margin = bp.alpha(a.lambda(m) - bp.epsilon);
    out.append(-b.mu - margin, -b.grad_u, "g_agg_" + std::to_string(m));
    out.matrix_forms.push_back(barrier_form(m - 2, projected, b.z, margin));
  }
  return out;
}

ConstraintEval eval_nominal(const NetworkState& x, const Eigen::Ref<const Eigen::VectorXd>& u,
                            const PriorityTask& task, const Eigen::VectorXd& nominal) {
  ConstraintEval out = ConstraintEval::empty(u.size());
  const int p = task.prioritized;
  if (p < 0) return out;
  const auto block = nominal.segment(x.offset(p), x.dim(p));
  if (block.squaredNorm() == 0.0) return out;

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(u.size());
  grad.segment(x.offset(p), x.dim(p)) = -block;
  const double value =
      task.k_frac * task.v_nom * task.v_nom - block.dot(u.segment(x.offset(p), x.dim(p)));
  out.append(value, grad, "g_nom");
  return out;
}

ConstraintEval eval_nominal(const NetworkState& x, const Eigen::Ref<const Eigen::VectorXd>& u,
                            const PriorityTask& task) {
  return eval_nominal(x, u, task, nominal_field(x, task));
}

FeasibilityProbe strict_feasibility_probe(const NetworkState& x, const NetworkAnalysis& a,
                                          const BarrierParams& bp, const PriorityTask& task) {
  const Eigen::VectorXd nominal = nominal_field(x, task);
  const int anchor = task.prioritized >= 0 ? task.prioritized : 0;

  FeasibilityProbe probe;
  probe.candidate = Eigen::VectorXd::Zero(x.size());
  if (task.prioritized >= 0) {
    probe.candidate.segment(x.offset(anchor), x.dim(anchor)) =
        nominal.segment(x.offset(anchor), x.dim(anchor));
  }
  const Eigen::VectorXd rally = x.robot(anchor);
  for (int r = 0; r < x.robots(); ++r) {
    if (r == anchor) continue;
    const Eigen::VectorXd toward = rally - x.robot(r);
    const double dist = toward.norm();
    if (dist > 0.0) probe.candidate.segment(x.offset(r), x.dim(r)) = task.v_nom * toward / dist;
  }

  probe.entries = eval_agg(a, probe.candidate, bp);
  probe.entries.append(eval_nominal(x, probe.candidate, task, nominal));
  probe.slack = -probe.entries.values.maxCoeff();
  return probe;
}

FeasibilityProbe strict_feasibility_probe(const NetworkState& x, const ProximityConfig& cfg,
                                          const BarrierParams& bp, const PriorityTask& task) {
  return strict_feasibility_probe(x, analyze(x, cfg), bp, task);
}

}  // namespace netconn
