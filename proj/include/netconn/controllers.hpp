#pragma once

#include "netconn/constraints.hpp"
#include "netconn/solver.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace netconn {

enum class ControllerKind { Discontinuous, Strict, Aggregate };

/// "dis", "str", "agg"
std::string_view short_name(ControllerKind kind);
ControllerKind parse_controller(std::string_view name);

/// Priority bookkeeping. `current` is the first unreached robot in
/// `priority_order`, or -1 once every robot has visited its target.
struct MissionState {
  std::vector<int> priority_order;
  int current = -1;
  std::vector<bool> reached;

  static MissionState start(std::vector<int> priority_order, int robots);
  bool done() const { return current < 0; }
};

/// Marks the prioritized robot reached once it is within the target radius
/// and hands priority to the next unreached robot (repeating if that one is
/// already inside its own radius).
MissionState advance_mission(const NetworkState& x, MissionState mission, const PriorityTask& task);

/// Copy of `base` with the prioritized robot and released flags of `mission`.
PriorityTask task_for(const PriorityTask& base, const MissionState& mission);

/// J(u) = |u - k_nom(x)|^2
CostEval cost_eval(const NetworkState& x, const Eigen::Ref<const Eigen::VectorXd>& u,
                   const PriorityTask& task);

/// Stacked constraint entries the controller of `kind` enforces at u.
ConstraintEval controller_constraints(ControllerKind kind, const NetworkState& x,
                                      const NetworkAnalysis& a,
                                      const Eigen::Ref<const Eigen::VectorXd>& u,
                                      const BarrierParams& bp, const PriorityTask& task);

/// argmin J subject to the nominal constraint and the barrier map of `kind`.
SolveResult control(const NetworkState& x, const NetworkAnalysis& a, ControllerKind kind,
                    const BarrierParams& bp, const PriorityTask& task, const SaddleParams& sp,
                    const std::optional<WarmStart>& warm = {});

SolveResult control(const NetworkState& x, const ProximityConfig& cfg, ControllerKind kind,
                    const BarrierParams& bp, const PriorityTask& task, const SaddleParams& sp,
                    const std::optional<WarmStart>& warm = {});

}  // namespace netconn
