#include "netconn/graph.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

namespace netconn {
namespace {

using testing::kSeed;

TEST(EdgeWeight, EndpointsAndBandStart) {
  const ProximityConfig cfg;
  EXPECT_DOUBLE_EQ(edge_weight(0.0, cfg), 1.0);
  EXPECT_EQ(edge_weight(cfg.range, cfg), 0.0);
  EXPECT_EQ(edge_weight(cfg.range + 3.0, cfg), 0.0);

  ProximityConfig wide;
  wide.sigma = wide.range;
  const double start = wide.range - wide.taper;
  EXPECT_DOUBLE_EQ(edge_weight(start, wide),
                   std::exp(-start * start / (2.0 * wide.range * wide.range)));
}

TEST(EdgeWeight, DerivativeVanishesAtOriginAndOutsideSupport) {
  const ProximityConfig cfg;
  EXPECT_EQ(edge_weight_derivative(0.0, cfg), 0.0);
  EXPECT_EQ(edge_weight_derivative(cfg.range, cfg), 0.0);
  EXPECT_EQ(edge_weight_derivative(cfg.range + 1.0, cfg), 0.0);
}

TEST(EdgeWeight, DerivativeMatchesCentralDifference) {
  ProximityConfig cfg;
  cfg.range = 2.5;
  cfg.sigma = 0.8;
  cfg.taper = 0.7;
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> d(1e-3, cfg.range - 1e-3);
  const double h = 1e-6;
  for (int k = 0; k < 200; ++k) {
    const double x = d(rng);
    const double fd = (edge_weight(x + h, cfg) - edge_weight(x - h, cfg)) / (2 * h);
    const double an = edge_weight_derivative(x, cfg);
    EXPECT_NEAR(fd, an, 1e-6 * std::max(1.0, std::abs(an))) << "d = " << x;
  }
}

TEST(EdgeWeight, SlopeIsContinuousAcrossBandEdges) {
  const ProximityConfig cfg;
  const double h = 1e-6;
  for (double knot : {cfg.range - cfg.taper, cfg.range}) {
    const double left = (edge_weight(knot, cfg) - edge_weight(knot - h, cfg)) / h;
    const double right = (edge_weight(knot + h, cfg) - edge_weight(knot, cfg)) / h;
    EXPECT_LT(std::abs(left - right), 1e-4) << "knot " << knot;
  }
}

TEST(ProximityConfig, RejectsInconsistentBand) {
  EXPECT_NO_THROW(ProximityConfig{}.validate());
  EXPECT_THROW((ProximityConfig{2.0, 1.0, 2.0}.validate()), std::invalid_argument);
  EXPECT_THROW((ProximityConfig{2.0, 0.0, 0.5}.validate()), std::invalid_argument);
  EXPECT_THROW((ProximityConfig{-1.0, 1.0, 0.5}.validate()), std::invalid_argument);
}

TEST(NetworkState, LayoutWithMixedDimensions) {
  Eigen::VectorXd p(6);
  p << 0, 0, 1, 2, 3, 4;
  const NetworkState x(p, {2, 3, 1});
  EXPECT_EQ(x.robots(), 3);
  EXPECT_EQ(x.size(), 6);
  EXPECT_EQ(x.offset(1), 2);
  EXPECT_EQ(x.offset(2), 5);
  EXPECT_EQ(x.owner(4), 1);
  EXPECT_EQ(x.owner(5), 2);
  EXPECT_EQ(x.robot(1), Eigen::Vector3d(1, 2, 3));
}

TEST(NetworkState, RejectsInvalidLayouts) {
  EXPECT_THROW(NetworkState::uniform(Eigen::VectorXd::Zero(2), 2), std::invalid_argument);
  EXPECT_THROW(NetworkState(Eigen::VectorXd::Zero(5), {2, 2}), std::invalid_argument);
  EXPECT_THROW(NetworkState::uniform(Eigen::VectorXd::Zero(5), 2), std::invalid_argument);
  Eigen::VectorXd bad = Eigen::VectorXd::Zero(4);
  bad(3) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(NetworkState::uniform(bad, 2), std::invalid_argument);
}

TEST(EvaluateGraph, TwoRobotLaplacian) {
  const ProximityConfig cfg;
  const NetworkState x = NetworkState::uniform(Eigen::Vector4d(0, 0, 0.6, 0.8), 2);
  const double w = edge_weight(1.0, cfg);
  const GraphEval g = evaluate_graph(x, cfg);
  Eigen::Matrix2d expected;
  expected << w, -w, -w, w;
  EXPECT_TRUE(g.laplacian.isApprox(expected, 1e-15));
  EXPECT_EQ(g.adjacency(0, 0), 0.0);
  EXPECT_EQ(g.adjacency(0, 1), w);
}

TEST(EvaluateGraph, CoincidentRobotsGetUnitWeightAndFlatDerivative) {
  const ProximityConfig cfg;
  const NetworkState x = NetworkState::uniform(Eigen::Vector4d(1, 1, 1, 1), 2);
  const GraphEval g = evaluate_graph(x, cfg);
  EXPECT_EQ(g.adjacency(0, 1), 1.0);
  for (const auto& j : g.jacobians) EXPECT_EQ(j.dense().norm(), 0.0);
}

TEST(EvaluateGraph, RejectsRobotsOfDifferentDimension) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(5);
  const NetworkState x(p, {2, 3});
  EXPECT_THROW(evaluate_graph(x, ProximityConfig{}), std::invalid_argument);
}

TEST(EvaluateGraph, StructuralInvariantsOnRandomStates) {
  const ProximityConfig cfg;
  std::mt19937_64 rng(kSeed);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 7;
    const NetworkState x = testing::random_state(rng, n, cfg);
    const GraphEval g = evaluate_graph(x, cfg);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);

    EXPECT_EQ((g.adjacency - g.adjacency.transpose()).norm(), 0.0);
    EXPECT_EQ(g.adjacency.diagonal().norm(), 0.0);
    EXPECT_GE(g.adjacency.minCoeff(), 0.0);
    EXPECT_LT((g.laplacian * ones).cwiseAbs().maxCoeff(), 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.laplacian, Eigen::EigenvaluesOnly);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);

    ASSERT_EQ(static_cast<int>(g.jacobians.size()), x.size());
    for (int i = 0; i < x.size(); ++i) {
      const Eigen::MatrixXd d = g.jacobians[static_cast<std::size_t>(i)].dense();
      EXPECT_EQ((d - d.transpose()).norm(), 0.0);
      EXPECT_LT((d * ones).cwiseAbs().maxCoeff(), 1e-12);
      // Entries off the owner's row/column and off the diagonal stay zero.
      const int p = x.owner(i);
      for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
          if (r != p && c != p && r != c) { EXPECT_EQ(d(r, c), 0.0); }
        }
      }
    }
  }
}

TEST(EvaluateGraph, JacobiansMatchFiniteDifferences) {
  const ProximityConfig cfg;
  std::mt19937_64 rng(kSeed + 1);
  const double h = 1e-6;
  for (int trial = 0; trial < 20; ++trial) {
    const NetworkState x = testing::random_state(rng, 3 + trial % 4, cfg);
    const GraphEval g = evaluate_graph(x, cfg);
    for (int i = 0; i < x.size(); ++i) {
      Eigen::VectorXd up = x.positions(), down = x.positions();
      up(i) += h;
      down(i) -= h;
      const Eigen::MatrixXd fd = (evaluate_graph(x.with_positions(up), cfg).laplacian -
                                  evaluate_graph(x.with_positions(down), cfg).laplacian) /
                                 (2 * h);
      const Eigen::MatrixXd an = g.jacobians[static_cast<std::size_t>(i)].dense();
      EXPECT_LT((fd - an).cwiseAbs().maxCoeff(), 1e-6) << "component " << i;
    }
  }
}

TEST(ComponentJacobian, FastPathsAgreeWithDenseMatrix) {
  const ProximityConfig cfg;
  std::mt19937_64 rng(kSeed + 2);
  const NetworkState x = testing::random_state(rng, 5, cfg);
  const GraphEval g = evaluate_graph(x, cfg);
  const Eigen::VectorXd v = random_normal(rng, 5);
  Eigen::MatrixXd basis = Eigen::MatrixXd::Random(5, 3);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(5, 5);
  for (const auto& j : g.jacobians) {
    const Eigen::MatrixXd d = j.dense();
    EXPECT_NEAR(j.quadratic_form(v), v.dot(d * v), 1e-12);
    EXPECT_TRUE(j.project(basis).isApprox(basis.transpose() * d * basis, 1e-12));
    j.accumulate(acc, 0.5);
  }
  const Eigen::VectorXd u = Eigen::VectorXd::Constant(x.size(), 0.5);
  EXPECT_TRUE(g.laplacian_rate(u).isApprox(acc, 1e-12));
  EXPECT_THROW(g.laplacian_rate(Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

}  // namespace
}  // namespace netconn
