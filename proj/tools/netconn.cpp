#include "netconn/acceptance.hpp"
#include "netconn/scenario.hpp"
#include "netconn/sim.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kConfigError = 2;

constexpr double kConnectivitySlack = 1e-3;

struct SimulateArgs {
  std::string scenario;
  std::string controller = "agg";
  std::optional<double> dt;
  std::optional<int> max_steps;
  std::string out;
};

struct ProbeArgs {
  std::string scenario;
  std::string controller;
};

struct CheckArgs {
  std::string scenario = NETCONN_DEFAULT_SCENARIO;
  std::vector<int> criteria;
  std::uint64_t seed = netconn::AcceptanceConfig{}.seed;
};

int simulate(const SimulateArgs& args, const netconn::SaddleParams& sp) {
  netconn::Scenario s = netconn::load_scenario(args.scenario);
  if (args.dt) s.dt = *args.dt;
  if (args.max_steps) s.max_steps = *args.max_steps;
  const netconn::ControllerKind kind = netconn::parse_controller(args.controller);

  const netconn::TrajectoryLog log = netconn::run(s, kind, sp);
  if (args.out.empty() || args.out == "-") {
    std::cout << netconn::format_csv(log);
  } else {
    netconn::export_csv(log, args.out);
  }

  int unconverged = 0;
  for (const auto& row : log.rows) unconverged += row.converged ? 0 : 1;
  const double lambda2 = netconn::min_lambda2(log);
  const double slack = netconn::min_slack(log);
  std::fprintf(stderr, "%s: %s after %d steps, min lambda_2 %.6f, min probe slack %.6f, %d unconverged solves\n",
               args.controller.c_str(),
               log.completed() ? "all targets reached"
               : log.status == netconn::RunStatus::Disconnected ? "disconnected"
                                                                 : "step limit",
               log.steps(), lambda2, slack, unconverged);
  if (!log.diagnostic.empty()) std::fprintf(stderr, "%s\n", log.diagnostic.c_str());

  const bool connected = log.status != netconn::RunStatus::Disconnected &&
                         lambda2 >= s.barrier.epsilon - kConnectivitySlack;
  return connected && slack > 0.0 ? kOk : kViolation;
}

int probe(const ProbeArgs& args, const netconn::SaddleParams& sp) {
  const netconn::Scenario s = netconn::load_scenario(args.scenario);
  std::printf("t,P,lambda_2,slack\n");
  double worst = 0.0;
  if (args.controller.empty()) {
    netconn::MissionState mission = netconn::MissionState::start(s.priority_order, s.initial.robots());
    mission = netconn::advance_mission(s.initial, mission, netconn::task_for(s.base_task(), mission));
    const netconn::PriorityTask task = netconn::task_for(s.base_task(), mission);
    const netconn::NetworkAnalysis a = netconn::analyze(s.initial, s.proximity);
    worst = netconn::strict_feasibility_probe(s.initial, a, s.barrier, task).slack;
    std::printf("0,%d,%.9g,%.9g\n", task.prioritized, a.lambda(2), worst);
  } else {
    const netconn::TrajectoryLog log = netconn::run(s, netconn::parse_controller(args.controller), sp);
    for (const auto& row : log.rows) {
      std::printf("%.9g,%d,%.9g,%.9g\n", row.t, row.prioritized, row.lambdas(1), row.slack);
    }
    worst = netconn::min_slack(log);
  }
  return worst > 0.0 ? kOk : kViolation;
}

int check(const CheckArgs& args, const netconn::SaddleParams& sp) {
  netconn::AcceptanceConfig config;
  config.scenario = args.scenario;
  config.seed = args.seed;
  config.solver = sp;
  config.only = args.criteria;
  const auto results = netconn::run_acceptance(config, [](const netconn::CriterionResult& r) {
    std::cout << netconn::format_result(r) << std::endl;
  });
  int failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  std::cout << results.size() - failed << "/" << results.size() << " criteria passed" << std::endl;
  return failed == 0 ? kOk : kViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Connectivity-preserving multi-robot controllers: simulation and checks"};
  app.require_subcommand(1);

  netconn::SaddleParams sp;
  auto add_solver_options = [&sp](CLI::App* cmd) {
    cmd->add_option("--solver-step", sp.step, "saddle-point step size")->check(CLI::PositiveNumber);
    cmd->add_option("--solver-iters", sp.max_iters, "iteration budget per solve")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--kkt-tol", sp.kkt_tol, "KKT residual stopping tolerance")
        ->check(CLI::PositiveNumber);
  };
  const std::vector<std::string> kinds{"dis", "str", "agg"};

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "run one controller on a scenario and write the CSV log");
  sim_cmd->add_option("--scenario", sim.scenario, "scenario file")->required();
  sim_cmd->add_option("--controller", sim.controller, "dis, str or agg")
      ->check(CLI::IsMember(kinds));
  sim_cmd->add_option("--dt", sim.dt, "integration step override (s)")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--max-steps", sim.max_steps, "step limit override")
      ->check(CLI::NonNegativeNumber);
  sim_cmd->add_option("--out", sim.out, "CSV output path, '-' for stdout");
  add_solver_options(sim_cmd);

  ProbeArgs pr;
  auto* probe_cmd =
      app.add_subcommand("probe", "print the strict-feasibility slack at the initial state or along a run");
  probe_cmd->add_option("--scenario", pr.scenario, "scenario file")->required();
  probe_cmd->add_option("--controller", pr.controller, "also probe every state of this controller's run")
      ->check(CLI::IsMember(kinds));
  add_solver_options(probe_cmd);

  CheckArgs ck;
  auto* check_cmd = app.add_subcommand("check", "run the acceptance suite");
  check_cmd->add_option("--scenario", ck.scenario, "mission for the closed-loop criteria");
  check_cmd->add_option("--criteria", ck.criteria, "criterion ids to run (default: all)")
      ->delimiter(',')->check(CLI::Range(1, netconn::criterion_count()));
  check_cmd->add_option("--seed", ck.seed, "random seed for the sampled criteria");
  add_solver_options(check_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*sim_cmd) return simulate(sim, sp);
    if (*probe_cmd) return probe(pr, sp);
    return check(ck, sp);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
  }
  return kConfigError;
}
