#include "netconn/controllers.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace netconn {
namespace {

using testing::kSeed;

PriorityTask task_toward(const NetworkState& x, const Eigen::VectorXd& targets, int prioritized) {
  PriorityTask t;
  t.prioritized = prioritized;
  t.targets = targets;
  t.reached.assign(static_cast<std::size_t>(x.robots()), false);
  return t;
}

// Targets 3.5 m out along the four axes: the robots pull the square apart.
Eigen::VectorXd axis_targets() {
  Eigen::VectorXd t(8);
  t << 3.5, 0, 0, 3.5, -3.5, 0, 0, -3.5;
  return t;
}

TEST(ControllerKind, ShortNamesRoundTrip) {
  for (auto kind : {ControllerKind::Discontinuous, ControllerKind::Strict, ControllerKind::Aggregate}) {
    EXPECT_EQ(parse_controller(short_name(kind)), kind);
  }
  EXPECT_THROW(parse_controller("qp"), std::invalid_argument);
}

TEST(Mission, StartAndValidation) {
  const MissionState m = MissionState::start({2, 0, 1}, 3);
  EXPECT_EQ(m.current, 2);
  EXPECT_FALSE(m.done());
  EXPECT_TRUE(MissionState::start({}, 3).done());
  EXPECT_THROW(MissionState::start({0, 3}, 3), std::invalid_argument);
}

TEST(Mission, AdvancesOnlyWhenPrioritizedRobotArrives) {
  const NetworkState x = testing::square(1.0);
  Eigen::VectorXd targets = x.positions() + Eigen::VectorXd::Constant(8, 2.0);
  PriorityTask base = task_toward(x, targets, -1);
  MissionState m = MissionState::start({1, 0, 2, 3}, 4);

  // Nobody inside a radius: unchanged, and applying it twice changes nothing.
  MissionState same = advance_mission(x, m, task_for(base, m));
  EXPECT_EQ(same.current, 1);
  EXPECT_EQ(advance_mission(x, same, task_for(base, same)).reached, m.reached);

  // Robot 0 sits on its target but does not hold priority: still unchanged.
  base.targets.segment(0, 2) = x.robot(0);
  EXPECT_EQ(advance_mission(x, m, task_for(base, m)).current, 1);

  // Robot 1 arrives; priority passes over robot 0 (already there) to robot 2.
  base.targets.segment(2, 2) = x.robot(1) + Eigen::Vector2d(0.1, 0.0);
  const MissionState next = advance_mission(x, m, task_for(base, m));
  EXPECT_TRUE(next.reached[1]);
  EXPECT_TRUE(next.reached[0]);
  EXPECT_EQ(next.current, 2);

  base.targets = x.positions();
  EXPECT_TRUE(advance_mission(x, m, task_for(base, m)).done());
}

TEST(Mission, TaskCarriesPriorityAndReleasedRobots) {
  const NetworkState x = testing::square(1.0);
  MissionState m = MissionState::start({3, 2, 1, 0}, 4);
  m.reached[0] = true;
  const PriorityTask t = task_for(task_toward(x, axis_targets(), -1), m);
  EXPECT_EQ(t.prioritized, 3);
  EXPECT_EQ(t.reached, m.reached);
  EXPECT_EQ(nominal_field(x, t).head(2).norm(), 0.0);
}

TEST(CostEval, DeviationFromNominal) {
  const NetworkState x = testing::square(1.0);
  const PriorityTask t = task_toward(x, axis_targets(), 0);
  const Eigen::VectorXd nominal = nominal_field(x, t);
  const CostEval at = cost_eval(x, nominal, t);
  EXPECT_EQ(at.value, 0.0);
  EXPECT_EQ(at.grad.norm(), 0.0);

  std::mt19937_64 rng(kSeed);
  const Eigen::VectorXd delta = random_normal(rng, 8);
  EXPECT_NEAR(cost_eval(x, nominal + delta, t).value, delta.squaredNorm(), 1e-12);

  const Eigen::VectorXd u = random_normal(rng, 8);
  const Eigen::VectorXd fd = central_difference_gradient(
      [&](const Eigen::VectorXd& v) { return cost_eval(x, v, t).value; }, u, 1e-6);
  EXPECT_LT((fd - cost_eval(x, u, t).grad).norm(), 1e-6 * cost_eval(x, u, t).grad.norm());
}

TEST(Control, ReturnsNominalWhenConstraintsAreSlack) {
  // Every robot heads the same way: the graph does not change, so the
  // barrier entries are inactive and the nominal constraint holds at k_nom.
  const ProximityConfig cfg;
  const NetworkState x = testing::square(0.8);
  Eigen::VectorXd shift(8);
  shift << 3, 1, 3, 1, 3, 1, 3, 1;
  const PriorityTask t = task_toward(x, x.positions() + shift, 0);
  const SaddleParams sp;
  for (auto kind : {ControllerKind::Discontinuous, ControllerKind::Strict, ControllerKind::Aggregate}) {
    const SolveResult r = control(x, cfg, kind, BarrierParams{}, t, sp);
    ASSERT_TRUE(r.converged);
    EXPECT_LT((r.u_star - nominal_field(x, t)).cwiseAbs().maxCoeff(), 2 * sp.kkt_tol);
  }
}

TEST(Control, StrictAndAggregateCoincideOnCompleteGraph) {
  const ProximityConfig cfg;
  const NetworkState x = testing::tetrahedron(1.2);
  const NetworkAnalysis a = analyze(x, cfg);
  // Threshold just below lambda_2 so the barrier binds.
  const BarrierParams bp{a.lambda(2) - 0.05, 1.0};
  Eigen::VectorXd targets = 4.0 * x.positions();
  const PriorityTask t = task_toward(x, targets, 2);
  const SaddleParams sp;
  const SolveResult s = control(x, a, ControllerKind::Strict, bp, t, sp);
  const SolveResult g = control(x, a, ControllerKind::Aggregate, bp, t, sp);
  ASSERT_TRUE(s.converged && g.converged);
  EXPECT_LT((s.u_star - g.u_star).cwiseAbs().maxCoeff(), 2 * sp.kkt_tol);
  EXPECT_GT(s.duals.maxCoeff(), 0.0);  // the barrier is active
}

TEST(Control, MatchesGridSearchOnTwoRobots) {
  // Two robots pulled apart along x; with lambda_2 close to the threshold
  // the barrier limits how fast they may separate.
  const ProximityConfig cfg;
  const NetworkState x = NetworkState::uniform(Eigen::Vector4d(0, 0, 1.4, 0), 2);
  const NetworkAnalysis a = analyze(x, cfg);
  const BarrierParams bp{a.lambda(2) - 0.02, 1.0};
  const PriorityTask t = task_toward(x, Eigen::Vector4d(-5, 0, 6.4, 0), 0);
  const ControllerKind kind = ControllerKind::Aggregate;
  const SolveResult r = control(x, a, kind, bp, t, SaddleParams{});
  ASSERT_TRUE(r.converged);

  const double res = 0.02;
  Eigen::Vector4d best = Eigen::Vector4d::Zero();
  double best_cost = std::numeric_limits<double>::infinity();
  Eigen::Vector4d u;
  for (double u0 = -0.6; u0 <= 0.6 + 1e-9; u0 += res) {
    for (double u1 = -0.3; u1 <= 0.3 + 1e-9; u1 += res) {
      for (double u2 = -0.6; u2 <= 0.6 + 1e-9; u2 += res) {
        for (double u3 = -0.3; u3 <= 0.3 + 1e-9; u3 += res) {
          u << u0, u1, u2, u3;
          const double c = cost_eval(x, u, t).value;
          if (c >= best_cost) continue;
          if (!controller_constraints(kind, x, a, u, bp, t).feasible()) continue;
          best = u;
          best_cost = c;
        }
      }
    }
  }
  EXPECT_LT((r.u_star - best).cwiseAbs().maxCoeff(), 2 * res);
  EXPECT_LE(cost_eval(x, r.u_star, t).value, best_cost + 1e-4);
  EXPECT_GT(r.duals.maxCoeff(), 0.0);
}

TEST(Control, ConvergedOutputsAreFeasibleAndStrictIsMoreConservative) {
  const ProximityConfig cfg;
  std::mt19937_64 rng(kSeed + 1);
  const SaddleParams sp;
  int compared = 0;
  for (int trial = 0; trial < 8; ++trial) {
    const NetworkState x = random_connected_state(rng, 4, cfg, 2.4, 0.3);
    const NetworkAnalysis a = analyze(x, cfg);
    const BarrierParams bp{0.8 * a.lambda(2), 1.0};
    const PriorityTask t = task_toward(x, 3.0 * x.positions(), trial % 4);
    std::optional<double> costs[2];
    int slot = 0;
    for (auto kind : {ControllerKind::Strict, ControllerKind::Aggregate}) {
      const SolveResult r = control(x, a, kind, bp, t, sp);
      if (r.converged) {
        EXPECT_LE(controller_constraints(kind, x, a, r.u_star, bp, t).values.maxCoeff(),
                  sp.kkt_tol);
        costs[slot] = cost_eval(x, r.u_star, t).value;
      }
      ++slot;
    }
    if (costs[0] && costs[1]) {
      EXPECT_GE(*costs[0], *costs[1] - 2 * sp.kkt_tol);
      ++compared;
    }
  }
  EXPECT_GE(compared, 6);
}

// Square stretched into a w x (2 - w) rectangle: at w = 1 the two lowest
// nonzero eigenvalues swap order.
NetworkState rectangle(double w) {
  const double a = 0.5 * w, b = 0.5 * (2.0 - w);
  Eigen::VectorXd p(8);
  p << a, b, -a, b, -a, -b, a, -b;
  return NetworkState::uniform(p, 2);
}

std::vector<Eigen::VectorXd> outputs_along_path(ControllerKind kind, const std::vector<double>& path,
                                                const BarrierParams& bp) {
  const ProximityConfig cfg;
  std::optional<WarmStart> warm;
  std::vector<Eigen::VectorXd> out;
  for (double w : path) {
    const NetworkState x = rectangle(w);
    const PriorityTask t = task_toward(x, axis_targets(), 0);
    const SolveResult r = control(x, cfg, kind, bp, t, SaddleParams{}, warm);
    warm = WarmStart{r.u_star, r.duals, r.matrix_duals};
    out.push_back(r.u_star);
  }
  return out;
}

TEST(Control, AggregateIsContinuousAcrossEigenvalueSwapWhileNaiveJumps) {
  const ProximityConfig cfg;
  const double lambda2 = analyze(rectangle(1.0), cfg).lambda(2);
  const BarrierParams bp{lambda2 - 0.02, 1.0};
  const double step = 0.002;
  std::vector<double> path;
  for (double w = 0.95; w <= 1.05 + 1e-12; w += step) path.push_back(w);

  const auto agg = outputs_along_path(ControllerKind::Aggregate, path, bp);
  const auto dis = outputs_along_path(ControllerKind::Discontinuous, path, bp);

  double smooth = 0.0, agg_max = 0.0, dis_max = 0.0;
  for (std::size_t k = 1; k < path.size(); ++k) {
    const double qa = (agg[k] - agg[k - 1]).norm() / step;
    const double qd = (dis[k] - dis[k - 1]).norm() / step;
    agg_max = std::max(agg_max, qa);
    dis_max = std::max(dis_max, qd);
    // Segments away from the swap estimate the Lipschitz constant.
    if (std::abs(path[k - 1] - 1.0) > 0.02 && std::abs(path[k] - 1.0) > 0.02) {
      smooth = std::max(smooth, qa);
    }
  }
  const double bound = 2.0 * smooth;
  EXPECT_LE(agg_max, bound);
  EXPECT_GT(dis_max, 10.0 * bound);
}

}  // namespace
}  // namespace netconn
