#pragma once

#include "netconn/oracles.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>

namespace netconn::testing {

inline constexpr std::uint64_t kSeed = 12345;

/// Planar robots on the corners of an axis-aligned square.
inline NetworkState square(double side) {
  const double h = 0.5 * side;
  Eigen::VectorXd p(8);
  p << h, h, -h, h, -h, -h, h, -h;
  return NetworkState::uniform(p, 2);
}

/// Regular tetrahedron with the given edge length: every pair is at the same
/// distance, so the proximity graph is complete with equal weights.
inline NetworkState tetrahedron(double edge) {
  const double s = edge / (2.0 * std::sqrt(2.0));
  Eigen::VectorXd p(12);
  p << s, s, s, s, -s, -s, -s, s, -s, -s, -s, s;
  return NetworkState::uniform(p, 3);
}

inline NetworkState random_state(std::mt19937_64& rng, int robots,
                                 const ProximityConfig& cfg = {}) {
  return random_connected_state(rng, robots, cfg, 1.2 * std::sqrt(static_cast<double>(robots)));
}

inline Eigen::MatrixXd complete_laplacian(int n, double w) {
  return w * (n * Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Ones(n, n));
}

}  // namespace netconn::testing
