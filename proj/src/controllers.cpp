#include "netconn/controllers.hpp"

#include <stdexcept>
#include <string>

namespace netconn {

std::string_view short_name(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::Discontinuous:
      return "dis";
    case ControllerKind::Strict:
      return "str";
    case ControllerKind::Aggregate:
      return "agg";
  }
  return "?";
}

ControllerKind parse_controller(std::string_view name) {
  if (name == "dis") return ControllerKind::Discontinuous;
  if (name == "str") return ControllerKind::Strict;
  if (name == "agg") return ControllerKind::Aggregate;
  throw std::invalid_argument("unknown controller '" + std::string(name) +
                              "' (expected dis, str or agg)");
}

MissionState MissionState::start(std::vector<int> priority_order, int robots) {
  MissionState m;
  m.reached.assign(static_cast<std::size_t>(robots), false);
  for (int r : priority_order) {
    if (r < 0 || r >= robots) {
      throw std::invalid_argument("MissionState: robot " + std::to_string(r) +
                                  " in priority order is out of range");
    }
  }
  m.priority_order = std::move(priority_order);
  m.current = m.priority_order.empty() ? -1 : m.priority_order.front();
  return m;
}

MissionState advance_mission(const NetworkState& x, MissionState mission, const PriorityTask& task) {
  while (mission.current >= 0) {
    const int p = mission.current;
    const double dist =
        (task.targets.segment(x.offset(p), x.dim(p)) - x.robot(p)).norm();
    if (dist > task.target_radius) break;
    mission.reached[static_cast<std::size_t>(p)] = true;
    mission.current = -1;
    for (int r : mission.priority_order) {
      if (!mission.reached[static_cast<std::size_t>(r)]) {
        mission.current = r;
        break;
      }
    }
  }
  return mission;
}

PriorityTask task_for(const PriorityTask& base, const MissionState& mission) {
  PriorityTask t = base;
  t.prioritized = mission.current;
  t.reached = mission.reached;
  return t;
}

CostEval cost_eval(const NetworkState& x, const Eigen::Ref<const Eigen::VectorXd>& u,
                   const PriorityTask& task) {
  const Eigen::VectorXd diff = u - nominal_field(x, task);
  return CostEval{diff.squaredNorm(), 2.0 * diff};
}

ConstraintEval controller_constraints(ControllerKind kind, const NetworkState& x,
                                      const NetworkAnalysis& a,
                                      const Eigen::Ref<const Eigen::VectorXd>& u,
                                      const BarrierParams& bp, const PriorityTask& task) {
  ConstraintEval out = eval_nominal(x, u, task);
  switch (kind) {
    case ControllerKind::Discontinuous:
      out.append(eval_cm(a, u, bp));
      break;
    case ControllerKind::Strict:
      out.append(eval_str(a, u, bp));
      break;
    case ControllerKind::Aggregate:
      out.append(eval_agg(a, u, bp));
      break;
  }
  return out;
}

SolveResult control(const NetworkState& x, const NetworkAnalysis& a, ControllerKind kind,
                    const BarrierParams& bp, const PriorityTask& task, const SaddleParams& sp,
                    const std::optional<WarmStart>& warm) {
  const Eigen::VectorXd nominal = nominal_field(x, task);

  const CostFunction cost = [&nominal](const Eigen::VectorXd& u) {
    const Eigen::VectorXd diff = u - nominal;
    return CostEval{diff.squaredNorm(), 2.0 * diff};
  };
  std::vector<ConstraintFunction> constraints;
  constraints.emplace_back([&](const Eigen::VectorXd& u) {
    return controller_constraints(kind, x, a, u, bp, task);
  });

  std::optional<WarmStart> init;
  if (sp.warm_start && warm) init = warm;
  return saddle_solve(x.size(), cost, constraints, sp, init);
}

SolveResult control(const NetworkState& x, const ProximityConfig& cfg, ControllerKind kind,
                    const BarrierParams& bp, const PriorityTask& task, const SaddleParams& sp,
                    const std::optional<WarmStart>& warm) {
  return control(x, analyze(x, cfg), kind, bp, task, sp, warm);
}

}  // namespace netconn
