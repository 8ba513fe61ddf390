#pragma once

#include "netconn/constraints.hpp"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace netconn {

/// A desk-scale mission: initial formation, one target per robot, the order
/// in which targets are prioritized, and every model parameter.
struct Scenario {
  NetworkState initial;
  Eigen::VectorXd targets;
  std::vector<int> priority_order;
  ProximityConfig proximity;
  BarrierParams barrier;
  double target_radius = 0.15;
  double v_nom = 0.5;
  double k_frac = 0.75;
  double dt = 0.01;
  int max_steps = 100000;

  /// Checks parameter ranges and that the initial state has
  /// lambda_2 >= epsilon.
  void validate() const;
  PriorityTask base_task() const;
};

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses the key/value scenario format:
///
///   # comment
///   dim = 2
///   positions = 0 0  1 0  ...
///   targets = ...
///   priority = 0 1 2 3
///   range = 2.0
///
/// Recognized scalar keys: dim, range, sigma, taper, epsilon, alpha, v_nom, k,
/// target_radius, dt, max_steps. `positions` and `targets` are required;
/// `priority` defaults to 0..n-1. Throws ScenarioError with the source name
/// and line number on malformed input.
Scenario parse_scenario(std::istream& in, const std::string& source = "<scenario>");
Scenario load_scenario(const std::filesystem::path& path);

/// Inverse of parse_scenario, full precision.
std::string format_scenario(const Scenario& s);

}  // namespace netconn
