#include "netconn/sim.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace netconn {

NetworkState step(const NetworkState& x, const Eigen::Ref<const Eigen::VectorXd>& u, double dt) {
  if (u.size() != x.size()) {
    throw std::invalid_argument("step: input has length " + std::to_string(u.size()) +
                                ", state has " + std::to_string(x.size()));
  }
  if (!u.allFinite() || !std::isfinite(dt)) throw std::invalid_argument("step: non-finite input");
  return x.with_positions(x.positions() + dt * u);
}

std::vector<std::string> constraint_labels(ControllerKind kind, int robots) {
  std::vector<std::string> labels;
  switch (kind) {
    case ControllerKind::Discontinuous:
      labels.push_back("g_cm");
      break;
    case ControllerKind::Strict:
      labels.push_back("g_str");
      break;
    case ControllerKind::Aggregate:
      for (int m = 2; m <= robots; ++m) labels.push_back("g_agg_" + std::to_string(m));
      break;
  }
  labels.push_back("g_nom");
  return labels;
}

namespace {

LogRow make_row(double t, const NetworkState& x, const NetworkAnalysis& a,
                const Eigen::VectorXd& u, ControllerKind kind, const BarrierParams& bp,
                const PriorityTask& task, const std::vector<std::string>& labels) {
  LogRow row;
  row.t = t;
  row.x = x.positions();
  row.u = u;
  row.lambdas = a.spectrum.eigenvalues;
  row.prioritized = task.prioritized;

  const ConstraintEval g = controller_constraints(kind, x, a, u, bp, task);
  row.g = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(labels.size()),
                                    std::numeric_limits<double>::quiet_NaN());
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    for (std::size_t c = 0; c < labels.size(); ++c) {
      if (labels[c] == g.labels[static_cast<std::size_t>(j)]) {
        row.g(static_cast<Eigen::Index>(c)) = g.values(j);
      }
    }
  }
  row.slack = strict_feasibility_probe(x, a, bp, task).slack;
  return row;
}

}  // namespace

TrajectoryLog run(const Scenario& scenario, ControllerKind kind, const SaddleParams& sp) {
  scenario.validate();
  sp.validate();

  TrajectoryLog log;
  log.kind = kind;
  log.robots = scenario.initial.robots();
  log.components = scenario.initial.size();
  log.g_labels = constraint_labels(kind, log.robots);

  const PriorityTask base = scenario.base_task();
  NetworkState x = scenario.initial;
  MissionState mission = MissionState::start(scenario.priority_order, log.robots);
  mission = advance_mission(x, mission, task_for(base, mission));

  std::optional<WarmStart> warm;

  for (int k = 0;; ++k) {
    const double t = k * scenario.dt;
    const PriorityTask task = task_for(base, mission);
    const NetworkAnalysis a = analyze(x, scenario.proximity);

    if (a.lambda(2) <= a.multiplicity_tolerance()) {
      log.rows.push_back(make_row(t, x, a, Eigen::VectorXd::Zero(x.size()), kind,
                                  scenario.barrier, task, log.g_labels));
      log.status = RunStatus::Disconnected;
      log.diagnostic = "graph disconnected at step " + std::to_string(k) + " (lambda_2 = " +
                       std::to_string(a.lambda(2)) + ")";
      break;
    }
    if (mission.done() || k >= scenario.max_steps) {
      log.rows.push_back(make_row(t, x, a, Eigen::VectorXd::Zero(x.size()), kind,
                                  scenario.barrier, task, log.g_labels));
      log.status = mission.done() ? RunStatus::Completed : RunStatus::StepLimit;
      break;
    }

    const SolveResult res = control(x, a, kind, scenario.barrier, task, sp, warm);
    warm = WarmStart{res.u_star, res.duals, res.matrix_duals};

    const Eigen::VectorXd& applied = res.u_star;
    LogRow row = make_row(t, x, a, applied, kind, scenario.barrier, task, log.g_labels);
    row.iters = res.iters;
    row.kkt = res.kkt_residual;
    row.converged = res.converged;

    x = step(x, applied, scenario.dt);
    const MissionState next = advance_mission(x, mission, task);
    row.mission_event = next.current != mission.current;
    mission = next;
    log.rows.push_back(std::move(row));
  }
  return log;
}

namespace {

void put(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  out += buf;
}

}  // namespace

std::string format_csv(const TrajectoryLog& log) {
  std::string out = "t";
  for (int i = 0; i < log.components; ++i) out += ",x_" + std::to_string(i);
  for (int i = 0; i < log.components; ++i) out += ",u_" + std::to_string(i);
  for (int m = 1; m <= log.robots; ++m) out += ",lambda_" + std::to_string(m);
  for (const auto& label : log.g_labels) out += "," + label;
  out += ",P,iters,kkt,slack\n";

  for (const LogRow& row : log.rows) {
    put(out, row.t);
    for (double v : row.x) out += ",", put(out, v);
    for (double v : row.u) out += ",", put(out, v);
    for (double v : row.lambdas) out += ",", put(out, v);
    for (double v : row.g) out += ",", put(out, v);
    out += "," + std::to_string(row.prioritized) + "," + std::to_string(row.iters) + ",";
    put(out, row.kkt);
    out += ",";
    put(out, row.slack);
    out += "\n";
  }
  return out;
}

void export_csv(const TrajectoryLog& log, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("export_csv: cannot open " + path.string() + " for writing");
  const std::string text = format_csv(log);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw std::runtime_error("export_csv: write to " + path.string() + " failed");
}

}  // namespace netconn
