#pragma once

#include "netconn/sim.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace netconn {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceConfig {
  /// Mission used by the closed-loop criteria (7 to 11).
  std::filesystem::path scenario;
  std::uint64_t seed = 20240607;
  SaddleParams solver;
  /// Criterion ids to run; empty runs all of them.
  std::vector<int> only;
};

/// Input-jump statistics of one closed-loop log. Steps across a priority
/// switch and into the terminal row are excluded.
struct JumpMetrics {
  double chi = 0.0;             // max |u_{k+1} - u_k|
  double smooth_rate = 0.0;     // max |u_{k+1} - u_k| / dt over well-separated steps
  int smooth_steps = 0;
  int compared_steps = 0;
  double min_gap = 0.0;         // smallest lambda_{m+1} - lambda_m (m >= 2) seen
};

/// A step counts as well separated when every gap lambda_{m+1} - lambda_m,
/// m = 2..n-1, exceeds `gap_threshold` at both of its endpoints.
JumpMetrics input_jumps(const TrajectoryLog& log, double dt, double gap_threshold);

double min_lambda2(const TrajectoryLog& log);
double min_slack(const TrajectoryLog& log);

int criterion_count();

/// Runs the selected criteria in id order, calling `report` as each finishes.
std::vector<CriterionResult> run_acceptance(
    const AcceptanceConfig& config,
    const std::function<void(const CriterionResult&)>& report = {});

/// "PASS  [ 7] title: detail (12.3 s)"
std::string format_result(const CriterionResult& r);

}  // namespace netconn
