#pragma once

#include "netconn/controllers.hpp"
#include "netconn/scenario.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace netconn {

/// x+ = x + dt * u
NetworkState step(const NetworkState& x, const Eigen::Ref<const Eigen::VectorXd>& u, double dt);

struct LogRow {
  double t = 0.0;
  Eigen::VectorXd x;
  Eigen::VectorXd u;
  Eigen::VectorXd lambdas;
  Eigen::VectorXd g;  // one entry per TrajectoryLog::g_labels, NaN when absent
  int prioritized = -1;
  int iters = 0;
  double kkt = 0.0;
  double slack = 0.0;
  bool converged = true;  // false: the solver's last iterate was applied
  bool mission_event = false;  // priority changed after this row's step
};

enum class RunStatus { Completed, StepLimit, Disconnected };

struct TrajectoryLog {
  ControllerKind kind = ControllerKind::Aggregate;
  int robots = 0;
  int components = 0;
  std::vector<std::string> g_labels;
  std::vector<LogRow> rows;
  RunStatus status = RunStatus::StepLimit;
  std::string diagnostic;

  /// Integration steps taken; the last row is the terminal state.
  int steps() const { return rows.empty() ? 0 : static_cast<int>(rows.size()) - 1; }
  bool completed() const { return status == RunStatus::Completed; }
};

/// Constraint column labels for `kind` on n robots, nominal entry last.
std::vector<std::string> constraint_labels(ControllerKind kind, int robots);

/// Closed loop: solve (warm-started), log, integrate, advance the mission.
/// Ends when every target has been visited, after `max_steps` steps, or when
/// the graph disconnects. The last row always holds the terminal state with a
/// zero input.
///
/// A solve that runs out of iterations still applies the solver's last
/// iterate; the row is flagged and its kkt column shows the residual.
TrajectoryLog run(const Scenario& scenario, ControllerKind kind, const SaddleParams& sp = {});

/// CSV text: header, then one row per log row, 9 significant digits.
std::string format_csv(const TrajectoryLog& log);
void export_csv(const TrajectoryLog& log, const std::filesystem::path& path);

}  // namespace netconn
