#pragma once

#include "netconn/constraint_eval.hpp"
#include "netconn/spectrum.hpp"

#include <vector>

namespace netconn {

/// Connectivity threshold and the linear class-K function alpha(s) = slope * s.
struct BarrierParams {
  double epsilon = 0.1;
  double alpha_slope = 1.0;

  double alpha(double s) const { return alpha_slope * s; }
  void validate() const;
};

/// Prioritized-target task: the conical nominal field, the priority
/// constraint on robot `prioritized`, and the robots already released.
struct PriorityTask {
  int prioritized = -1;           // -1 once every target has been visited
  Eigen::VectorXd targets;        // stacked like the state
  std::vector<bool> reached;      // released robots have a zero nominal field
  double target_radius = 0.15;
  double v_nom = 0.5;
  double k_frac = 0.75;

  void validate(const NetworkState& x) const;
};

/// Per robot r: v_nom * e_r / |e_r| with e_r = target_r - x_r, zero once r is
/// released or within the target radius.
Eigen::VectorXd nominal_field(const NetworkState& x, const PriorityTask& task);

/// Naive map: lambda_2's own eigenspace only. Discontinuous in x.
ConstraintEval eval_cm(const NetworkAnalysis& a, const Eigen::Ref<const Eigen::VectorXd>& u,
                       const BarrierParams& bp);

/// Strict map: mu_[2:n] against alpha(lambda_2 - eps).
ConstraintEval eval_str(const NetworkAnalysis& a, const Eigen::Ref<const Eigen::VectorXd>& u,
                        const BarrierParams& bp);

/// Aggregate map: entry m pairs mu_[2:m] with alpha(lambda_m - eps), m = 2..n.
ConstraintEval eval_agg(const NetworkAnalysis& a, const Eigen::Ref<const Eigen::VectorXd>& u,
                        const BarrierParams& bp);

/// k v_nom^2 - u_nom,P^T u_P <= 0. Empty when no robot is prioritized or the
/// prioritized robot's nominal field vanishes.
ConstraintEval eval_nominal(const NetworkState& x, const Eigen::Ref<const Eigen::VectorXd>& u,
                            const PriorityTask& task);

/// Same, with the nominal field already computed.
ConstraintEval eval_nominal(const NetworkState& x, const Eigen::Ref<const Eigen::VectorXd>& u,
                            const PriorityTask& task, const Eigen::VectorXd& nominal);

struct FeasibilityProbe {
  double slack = 0.0;          // -max over aggregate and nominal entries
  Eigen::VectorXd candidate;   // control the slack was measured at
  ConstraintEval entries;
};

/// Evaluates the aggregate and nominal constraints at a hand-built control:
/// the prioritized robot follows its nominal field and every other robot
/// heads for it at speed v_nom. With no prioritized robot, robot 0 stays put
/// and acts as the rally point. Positive slack certifies strict feasibility.
FeasibilityProbe strict_feasibility_probe(const NetworkState& x, const NetworkAnalysis& a,
                                          const BarrierParams& bp, const PriorityTask& task);

FeasibilityProbe strict_feasibility_probe(const NetworkState& x, const ProximityConfig& cfg,
                                          const BarrierParams& bp, const PriorityTask& task);

}  // namespace netconn
