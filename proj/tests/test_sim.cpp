#include "netconn/sim.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

namespace netconn {
namespace {

Scenario bundled() { return load_scenario(NETCONN_SCENARIO_DIR "/pullapart.scn"); }

int count_lines(const std::string& text) {
  return static_cast<int>(std::count(text.begin(), text.end(), '\n'));
}

TEST(Step, ExplicitEuler) {
  const NetworkState x = testing::square(1.0);
  EXPECT_EQ(step(x, Eigen::VectorXd::Zero(8), 0.01).positions(), x.positions());

  const NetworkState origin = NetworkState::uniform(Eigen::VectorXd::Zero(4), 2);
  EXPECT_EQ(step(origin, Eigen::VectorXd::Ones(4), 0.1).positions(),
            Eigen::VectorXd::Constant(4, 0.1));

  const Eigen::VectorXd u = Eigen::VectorXd::LinSpaced(8, -1.0, 1.0);
  const NetworkState halves = step(step(x, u, 0.05), u, 0.05);
  EXPECT_TRUE(halves.positions().isApprox(step(x, u, 0.1).positions(), 1e-15));
}

TEST(Step, RejectsBadInput) {
  const NetworkState x = testing::square(1.0);
  EXPECT_THROW(step(x, Eigen::VectorXd::Zero(6), 0.01), std::invalid_argument);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(8);
  u(2) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(step(x, u, 0.01), std::invalid_argument);
}

TEST(ConstraintLabels, PerKind) {
  EXPECT_EQ(constraint_labels(ControllerKind::Discontinuous, 4),
            (std::vector<std::string>{"g_cm", "g_nom"}));
  EXPECT_EQ(constraint_labels(ControllerKind::Strict, 4),
            (std::vector<std::string>{"g_str", "g_nom"}));
  EXPECT_EQ(constraint_labels(ControllerKind::Aggregate, 4),
            (std::vector<std::string>{"g_agg_2", "g_agg_3", "g_agg_4", "g_nom"}));
}

TEST(Run, AllTargetsReachedAtStart) {
  Scenario s = bundled();
  s.targets = s.initial.positions();
  const TrajectoryLog log = run(s, ControllerKind::Aggregate);
  EXPECT_TRUE(log.completed());
  EXPECT_EQ(log.steps(), 0);
  ASSERT_EQ(log.rows.size(), 1u);
  EXPECT_EQ(log.rows[0].u.norm(), 0.0);
  EXPECT_EQ(log.rows[0].prioritized, -1);
}

TEST(Run, RejectsStartOutsideSafeSet) {
  Scenario s = bundled();
  s.barrier.epsilon = 5.0;
  EXPECT_THROW(run(s, ControllerKind::Strict), ScenarioError);
}

class ShortRun : public ::testing::TestWithParam<ControllerKind> {};

TEST_P(ShortRun, LogStructureAndCertificates) {
  Scenario s = bundled();
  s.max_steps = 250;
  const TrajectoryLog log = run(s, GetParam());
  EXPECT_EQ(log.status, RunStatus::StepLimit);
  EXPECT_EQ(log.steps(), s.max_steps);
  ASSERT_EQ(static_cast<int>(log.rows.size()), s.max_steps + 1);
  EXPECT_EQ(log.rows.back().u.norm(), 0.0);

  for (std::size_t k = 0; k < log.rows.size(); ++k) {
    const LogRow& row = log.rows[k];
    if (k > 0) { EXPECT_GT(row.t, log.rows[k - 1].t); }
    EXPECT_EQ(row.g.size(), static_cast<Eigen::Index>(log.g_labels.size()));
    EXPECT_EQ(row.lambdas.size(), 4);
    EXPECT_EQ(row.prioritized, 0);
  }
  if (GetParam() != ControllerKind::Discontinuous) {
    for (const LogRow& row : log.rows) {
      EXPECT_GE(row.lambdas(1), s.barrier.epsilon - 1e-3);
      EXPECT_GT(row.slack, 0.0);
    }
  }
}

TEST_P(ShortRun, RepeatedRunsGiveIdenticalCsv) {
  Scenario s = bundled();
  s.max_steps = 120;
  EXPECT_EQ(format_csv(run(s, GetParam())), format_csv(run(s, GetParam())));
}

INSTANTIATE_TEST_SUITE_P(Kinds, ShortRun,
                         ::testing::Values(ControllerKind::Discontinuous, ControllerKind::Strict,
                                           ControllerKind::Aggregate),
                         [](const auto& info) { return std::string(short_name(info.param)); });

TEST(Run, EigenvalueRatesRespectTheBarrier) {
  Scenario s = bundled();
  s.max_steps = 400;
  const TrajectoryLog log = run(s, ControllerKind::Aggregate);
  const BarrierParams& bp = s.barrier;
  for (std::size_t k = 0; k + 2 < log.rows.size(); ++k) {
    const LogRow& now = log.rows[k];
    const LogRow& next = log.rows[k + 1];
    // A finite-difference rate differs from the instantaneous one by a
    // second-order term of size dt * |u|^2.
    const double tol = s.dt * std::pow(1.0 + now.u.norm(), 2);
    for (Eigen::Index m = 1; m < now.lambdas.size(); ++m) {
      const double rate = (next.lambdas(m) - now.lambdas(m)) / s.dt;
      EXPECT_GE(rate, -bp.alpha(now.lambdas(m) - bp.epsilon) - tol) << "step " << k << " m " << m + 1;
    }
  }
}

TEST(Csv, HeaderAndRowCount) {
  TrajectoryLog log;
  log.robots = 2;
  log.components = 4;
  log.g_labels = constraint_labels(ControllerKind::Strict, 2);
  const std::string empty = format_csv(log);
  EXPECT_EQ(empty,
            "t,x_0,x_1,x_2,x_3,u_0,u_1,u_2,u_3,lambda_1,lambda_2,g_str,g_nom,P,iters,kkt,slack\n");

  LogRow row;
  row.x = Eigen::VectorXd::Zero(4);
  row.u = Eigen::VectorXd::Zero(4);
  row.lambdas = Eigen::Vector2d(0, 1.0 / 3.0);
  row.g = Eigen::Vector2d(-0.5, std::numeric_limits<double>::quiet_NaN());
  for (int k = 0; k < 3; ++k) {
    row.t = 0.01 * k;
    log.rows.push_back(row);
  }
  const std::string text = format_csv(log);
  EXPECT_EQ(count_lines(text), 4);
  EXPECT_NE(text.find(",0.333333333,-0.5,nan,"), std::string::npos);
}

TEST(Csv, ExportWritesFileAndReportsPath) {
  Scenario s = bundled();
  s.max_steps = 3;
  const TrajectoryLog log = run(s, ControllerKind::Strict);
  const auto path = std::filesystem::temp_directory_path() / "netconn_test_export.csv";
  export_csv(log, path);
  std::ifstream in(path, std::ios::binary);
  const std::string text(std::istreambuf_iterator<char>(in), {});
  EXPECT_EQ(text, format_csv(log));
  EXPECT_EQ(count_lines(text), 1 + 4);  // header, three steps, terminal state
  std::filesystem::remove(path);

  const std::filesystem::path bad = "/nonexistent-dir/out.csv";
  try {
    export_csv(log, bad);
    FAIL() << "expected an I/O error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find(bad.string()), std::string::npos);
  }
}

}  // namespace
}  // namespace netconn
