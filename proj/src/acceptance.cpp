#include "netconn/acceptance.hpp"

#include "netconn/oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iterator>
#include <limits>
#include <map>
#include <random>
#include <thread>

namespace netconn {

namespace {

// Pinned tolerances and budgets.
constexpr double kSpectralLambda1 = 1e-9;
constexpr double kRowSum = 1e-12;
constexpr double kReconstruction = 1e-8;
constexpr double kSpectralSeconds = 5.0;

constexpr double kOracleSlack = 1e-9;
constexpr double kOracleGap = 1e-3;
constexpr double kOracleSeconds = 60.0;

constexpr double kConcavity = 1e-9;
constexpr double kHomogeneity = 1e-9;
constexpr double kNesting = 1e-10;

constexpr double kGradientRel = 1e-4;
constexpr double kGradientStep = 1e-6;
constexpr double kSimpleGap = 1e-6;

constexpr double kToyKkt = 1e-5;
constexpr double kToyPoint = 1e-4;
constexpr double kQpMatch = 1e-3;

constexpr double kConnectivitySlack = 1e-3;
constexpr double kRunSeconds = 300.0;

constexpr double kChatterRatio = 10.0;
constexpr double kSeparatedGap = 0.03;
constexpr double kSmoothRateFactor = 2.0;
constexpr double kMergeGap = 1e-6;

constexpr int kDeterminismSteps = 300;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

CriterionResult titled(int id, std::string title) {
  CriterionResult r;
  r.id = id;
  r.title = std::move(title);
  return r;
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

double uniform_real(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

NetworkState random_state(std::mt19937_64& rng, int robots, const ProximityConfig& cfg) {
  return random_connected_state(rng, robots, cfg, 1.2 * std::sqrt(static_cast<double>(robots)));
}

CriterionResult spectral_correctness(std::mt19937_64& rng) {
  CriterionResult r = titled(1, "spectral correctness on 200 random connected graphs");
  const ProximityConfig cfg;
  double worst_l1 = 0.0, worst_rows = 0.0, worst_rec = 0.0;
  const auto start = Clock::now();
  for (int trial = 0; trial < 200; ++trial) {
    const NetworkState x = random_state(rng, uniform_int(rng, 3, 8), cfg);
    const GraphEval g = evaluate_graph(x, cfg);
    const Spectrum s = spectral_decompose(g.laplacian);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(g.robots());
    const Eigen::MatrixXd rebuilt =
        s.eigenvectors * s.eigenvalues.asDiagonal() * s.eigenvectors.transpose();
    worst_l1 = std::max(worst_l1, std::abs(s.lambda(1)));
    worst_rows = std::max(worst_rows, (g.laplacian * ones).cwiseAbs().maxCoeff());
    worst_rec = std::max(worst_rec, (rebuilt - g.laplacian).norm());
  }
  const double elapsed = seconds_since(start);
  r.passed = worst_l1 < kSpectralLambda1 && worst_rows < kRowSum && worst_rec < kReconstruction &&
             elapsed < kSpectralSeconds;
  r.detail = "max |lambda_1| " + fmt("%.2e", worst_l1) + ", max |L1| " + fmt("%.2e", worst_rows) +
             ", max reconstruction " + fmt("%.2e", worst_rec);
  return r;
}

CriterionResult oracle_equivalence(std::mt19937_64& rng) {
  CriterionResult r = titled(2, "merged bound vs convex-hull sampling oracle, 100 draws");
  const ProximityConfig cfg;
  const std::vector<int> budgets{10, 100, 1000, 10000, 100000};
  double worst_excess = -std::numeric_limits<double>::infinity();
  double worst_gap = 0.0;
  int pairs = 0;
  const auto start = Clock::now();
  for (int trial = 0; trial < 100; ++trial) {
    const NetworkState x = random_state(rng, uniform_int(rng, 3, 5), cfg);
    const NetworkAnalysis a = analyze(x, cfg);
    const Eigen::VectorXd u = random_normal(rng, x.size());
    for (int m = 2; m <= x.robots(); ++m) {
      const double mu = merged_lower_bound(a, u, m).mu;
      const std::vector<double> running = oracle_convex_hull_min(a, u, m, budgets, rng);
      for (double est : running) worst_excess = std::max(worst_excess, mu - est);
      worst_gap = std::max(worst_gap, running.back() - mu);
      ++pairs;
    }
  }
  const double elapsed = seconds_since(start);
  r.passed = worst_excess <= kOracleSlack && worst_gap < kOracleGap && elapsed < kOracleSeconds;
  r.detail = std::to_string(pairs) + " (x,u,m) triples; max(mu - oracle) " +
             fmt("%.2e", worst_excess) + ", max gap at 1e5 samples " + fmt("%.2e", worst_gap);
  return r;
}

CriterionResult concavity(std::mt19937_64& rng) {
  CriterionResult r = titled(3, "concavity of the merged bounds in u, 1000 triples");
  const ProximityConfig cfg;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const NetworkState x = random_state(rng, uniform_int(rng, 3, 6), cfg);
    const NetworkAnalysis a = analyze(x, cfg);
    const Eigen::VectorXd u1 = random_normal(rng, x.size());
    const Eigen::VectorXd u2 = random_normal(rng, x.size());
    const double gamma = uniform_real(rng, 0.0, 1.0);
    const auto b1 = merged_lower_bounds(a, u1);
    const auto b2 = merged_lower_bounds(a, u2);
    const auto mix = merged_lower_bounds(a, gamma * u1 + (1.0 - gamma) * u2);
    for (std::size_t k = 0; k < mix.size(); ++k) {
      const double violation = gamma * b1[k].mu + (1.0 - gamma) * b2[k].mu - mix[k].mu;
      worst = std::max(worst, violation);
    }
  }
  r.passed = worst < kConcavity;
  r.detail = "max violation " + fmt("%.2e", worst);
  return r;
}

CriterionResult homogeneity_nesting(std::mt19937_64& rng) {
  CriterionResult r = titled(4, "positive homogeneity and nesting, 500 draws");
  const ProximityConfig cfg;
  double worst_rel = 0.0, worst_nest = -std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 500; ++trial) {
    const NetworkState x = random_state(rng, uniform_int(rng, 3, 6), cfg);
    const NetworkAnalysis a = analyze(x, cfg);
    const Eigen::VectorXd u = random_normal(rng, x.size());
    const double c = uniform_real(rng, 0.0, 10.0);
    const auto base = merged_lower_bounds(a, u);
    const auto scaled = merged_lower_bounds(a, c * u);
    for (std::size_t k = 0; k < base.size(); ++k) {
      // Relative to the scale of Z: eigenvalues are only that accurate.
      const double scale = std::max(std::abs(c * base[k].mu), c * base[k].z.norm());
      const double err = std::abs(scaled[k].mu - c * base[k].mu);
      if (err > 0.0) worst_rel = std::max(worst_rel, err / scale);
      if (k > 0) worst_nest = std::max(worst_nest, base[k].mu - base[k - 1].mu);
    }
  }
  r.passed = worst_rel < kHomogeneity && worst_nest <= kNesting;
  r.detail = "max homogeneity rel. error " + fmt("%.2e", worst_rel) +
             ", max nesting excess " + fmt("%.2e", worst_nest);
  return r;
}

CriterionResult gradient_fidelity(std::mt19937_64& rng) {
  CriterionResult r = titled(5, "analytic merged-bound gradient vs central differences, 200 points");
  const ProximityConfig cfg;
  double worst = 0.0;
  int points = 0, skipped = 0;
  while (points < 200) {
    const NetworkState x = random_state(rng, uniform_int(rng, 3, 6), cfg);
    const NetworkAnalysis a = analyze(x, cfg);
    const Eigen::VectorXd u = random_normal(rng, x.size());
    const int m = uniform_int(rng, 2, x.robots());
    const MergedBoundEval e = merged_lower_bound(a, u, m);
    if (!(e.gap > kSimpleGap)) {
      ++skipped;
      continue;
    }
    const Eigen::VectorXd fd = central_difference_gradient(
        [&](const Eigen::VectorXd& v) { return merged_lower_bound(a, v, m).mu; }, u, kGradientStep);
    worst = std::max(worst, (fd - e.grad_u).norm() / e.grad_u.norm());
    ++points;
  }
  r.passed = worst < kGradientRel;
  r.detail = "max relative error " + fmt("%.2e", worst) + " (" + std::to_string(skipped) +
             " draws skipped for a repeated minimum)";
  return r;
}

CostFunction quadratic_cost(const QuadraticProgram& qp) {
  return [qp](const Eigen::VectorXd& u) {
    return CostEval{qp.value(u), qp.hessian * u + qp.linear};
  };
}

ConstraintFunction affine_constraints(const QuadraticProgram& qp) {
  return [qp](const Eigen::VectorXd& u) {
    ConstraintEval g = ConstraintEval::empty(u.size());
    for (Eigen::Index j = 0; j < qp.a.rows(); ++j) {
      g.append(qp.a.row(j).dot(u) - qp.b(j), qp.a.row(j).transpose(), "affine");
    }
    return g;
  };
}

CriterionResult solver_soundness(std::mt19937_64& rng, const SaddleParams& sp) {
  CriterionResult r = titled(6, "saddle solver on a hand-solved program and 50 random QPs");

  // min |u|^2 s.t. 1 - u_1 <= 0: u* = e_1, dual 2.
  QuadraticProgram toy;
  toy.hessian = 2.0 * Eigen::MatrixXd::Identity(3, 3);
  toy.linear = Eigen::VectorXd::Zero(3);
  toy.a = Eigen::MatrixXd::Zero(1, 3);
  toy.a(0, 0) = -1.0;
  toy.b = Eigen::VectorXd::Constant(1, -1.0);
  const std::vector<ConstraintFunction> toy_g{affine_constraints(toy)};
  const SolveResult t = saddle_solve(3, quadratic_cost(toy), toy_g, sp);
  const double toy_err = std::max((t.u_star - Eigen::Vector3d(1, 0, 0)).cwiseAbs().maxCoeff(),
                                  std::abs(t.duals(0) - 2.0));
  const bool toy_ok = t.converged && t.kkt_residual < kToyKkt && toy_err < kToyPoint;

  double worst = 0.0;
  int unconverged = 0;
  SaddleParams random_sp = sp;
  random_sp.max_iters = std::max(sp.max_iters, 200000);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = uniform_int(rng, 2, 8);
    const int rows = uniform_int(rng, 1, 4);
    QuadraticProgram qp;
    Eigen::MatrixXd m(n, n);
    for (int c = 0; c < n; ++c) m.col(c) = random_normal(rng, n);
    qp.hessian = 2.0 * Eigen::MatrixXd::Identity(n, n) + m.transpose() * m / n;
    qp.linear = 2.0 * random_normal(rng, n);
    qp.a.resize(rows, n);
    qp.b.resize(rows);
    const Eigen::VectorXd interior = 0.5 * random_normal(rng, n);
    for (int j = 0; j < rows; ++j) {
      qp.a.row(j) = random_normal(rng, n).transpose();
      qp.b(j) = qp.a.row(j).dot(interior) + uniform_real(rng, 0.1, 1.0);
    }
    const QpSolution oracle = brute_force_qp(qp);
    const std::vector<ConstraintFunction> g{affine_constraints(qp)};
    const SolveResult s = saddle_solve(n, quadratic_cost(qp), g, random_sp);
    if (!s.converged) ++unconverged;
    worst = std::max(worst, (s.u_star - oracle.u).cwiseAbs().maxCoeff());
  }
  r.passed = toy_ok && worst < kQpMatch && unconverged == 0;
  r.detail = "toy kkt " + fmt("%.2e", t.kkt_residual) + ", toy point error " +
             fmt("%.2e", toy_err) + "; random QPs max |u - oracle| " + fmt("%.2e", worst) +
             ", " + std::to_string(unconverged) + " unconverged";
  return r;
}

struct TimedRun {
  TrajectoryLog log;
  double seconds = 0.0;
};

TimedRun timed_run(const Scenario& s, ControllerKind kind, const SaddleParams& sp) {
  const auto start = Clock::now();
  TrajectoryLog log = run(s, kind, sp);
  return {std::move(log), seconds_since(start)};
}

std::string run_summary(const char* name, const TimedRun& t) {
  std::string status = t.log.completed() ? "completed" : "NOT completed";
  return std::string(name) + " " + status + " in " + std::to_string(t.log.steps()) +
         " steps, min lambda_2 " + fmt("%.5f", min_lambda2(t.log)) + ", " +
         fmt("%.1f", t.seconds) + " s";
}

bool byte_identical_runs(const Scenario& s, ControllerKind kind, const SaddleParams& sp) {
  const std::string a = format_csv(run(s, kind, sp));
  const std::string b = format_csv(run(s, kind, sp));
  if (a != b) return false;

  const auto dir = std::filesystem::temp_directory_path();
  const std::string tag = std::string(short_name(kind)) + "_" + std::to_string(Clock::now().time_since_epoch().count());
  const auto pa = dir / ("netconn_det_a_" + tag + ".csv");
  const auto pb = dir / ("netconn_det_b_" + tag + ".csv");
  export_csv(run(s, kind, sp), pa);
  export_csv(run(s, kind, sp), pb);
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  const bool same = slurp(pa) == slurp(pb) && slurp(pa) == a;
  std::filesystem::remove(pa);
  std::filesystem::remove(pb);
  return same;
}

}  // namespace

JumpMetrics input_jumps(const TrajectoryLog& log, double dt, double gap_threshold) {
  JumpMetrics out;
  out.min_gap = std::numeric_limits<double>::infinity();
  auto smallest_gap = [](const LogRow& row) {
    double g = std::numeric_limits<double>::infinity();
    for (Eigen::Index m = 2; m < row.lambdas.size(); ++m) {
      g = std::min(g, row.lambdas(m) - row.lambdas(m - 1));
    }
    return g;
  };
  for (const LogRow& row : log.rows) out.min_gap = std::min(out.min_gap, smallest_gap(row));

  // The terminal row carries a zero input, so the last real pair is (R-3, R-2).
  const auto rows = static_cast<std::ptrdiff_t>(log.rows.size());
  for (std::ptrdiff_t k = 0; k + 2 < rows; ++k) {
    const LogRow& a = log.rows[static_cast<std::size_t>(k)];
    const LogRow& b = log.rows[static_cast<std::size_t>(k + 1)];
    if (a.mission_event) continue;
    const double jump = (b.u - a.u).norm();
    ++out.compared_steps;
    out.chi = std::max(out.chi, jump);
    if (std::min(smallest_gap(a), smallest_gap(b)) > gap_threshold) {
      ++out.smooth_steps;
      out.smooth_rate = std::max(out.smooth_rate, jump / dt);
    }
  }
  return out;
}

double min_lambda2(const TrajectoryLog& log) {
  double out = std::numeric_limits<double>::infinity();
  for (const LogRow& row : log.rows) out = std::min(out, row.lambdas(1));
  return out;
}

double min_slack(const TrajectoryLog& log) {
  double out = std::numeric_limits<double>::infinity();
  for (const LogRow& row : log.rows) out = std::min(out, row.slack);
  return out;
}

int criterion_count() { return 11; }

std::vector<CriterionResult> run_acceptance(
    const AcceptanceConfig& config, const std::function<void(const CriterionResult&)>& report) {
  auto wanted = [&](int id) {
    return config.only.empty() ||
           std::find(config.only.begin(), config.only.end(), id) != config.only.end();
  };
  std::vector<CriterionResult> results;
  auto record = [&](CriterionResult r, Clock::time_point start) {
    r.seconds = seconds_since(start);
    if (report) report(r);
    results.push_back(std::move(r));
  };

  using Unit = CriterionResult (*)(std::mt19937_64&);
  const std::pair<int, Unit> units[] = {{1, spectral_correctness},
                                        {2, oracle_equivalence},
                                        {3, concavity},
                                        {4, homogeneity_nesting},
                                        {5, gradient_fidelity}};
  for (const auto& [id, fn] : units) {
    if (!wanted(id)) continue;
    std::mt19937_64 local(config.seed + static_cast<std::uint64_t>(id));
    const auto start = Clock::now();
    record(fn(local), start);
  }
  if (wanted(6)) {
    std::mt19937_64 local(config.seed + 6);
    const auto start = Clock::now();
    record(solver_soundness(local, config.solver), start);
  }

  const bool need_mission = wanted(7) || wanted(8) || wanted(9) || wanted(10) || wanted(11);
  if (!need_mission) return results;

  const Scenario scenario = load_scenario(config.scenario);
  const SaddleParams& sp = config.solver;

  // Independent closed-loop runs go in parallel, each with its own log. On a
  // single core they run one at a time so each timing stays meaningful.
  const auto policy = std::thread::hardware_concurrency() > 1 ? std::launch::async
                                                               : std::launch::deferred;
  std::map<ControllerKind, std::future<TimedRun>> pending;
  auto launch = [&](ControllerKind kind) {
    if (!pending.count(kind)) {
      pending.emplace(kind, std::async(policy, timed_run, std::cref(scenario), kind,
                                       std::cref(sp)));
    }
  };
  if (wanted(7) || wanted(8) || wanted(10)) launch(ControllerKind::Strict);
  if (wanted(7) || wanted(8) || wanted(9) || wanted(10)) launch(ControllerKind::Aggregate);
  if (wanted(9)) launch(ControllerKind::Discontinuous);
  std::map<ControllerKind, TimedRun> done;
  auto get = [&](ControllerKind kind) -> const TimedRun& {
    if (!done.count(kind)) done.emplace(kind, pending.at(kind).get());
    return done.at(kind);
  };

  if (wanted(7)) {
    const auto start = Clock::now();
    CriterionResult r = titled(7, "connectivity maintenance on the bundled mission");
    const bool paper_params = scenario.v_nom == 0.5 && scenario.k_frac == 0.75 &&
                              scenario.barrier.epsilon == 0.1 &&
                              scenario.barrier.alpha_slope == 1.0 && scenario.max_steps <= 100000;
    bool ok = paper_params;
    for (ControllerKind kind : {ControllerKind::Strict, ControllerKind::Aggregate}) {
      const TimedRun& t = get(kind);
      ok = ok && t.log.completed() &&
           min_lambda2(t.log) >= scenario.barrier.epsilon - kConnectivitySlack &&
           t.seconds < kRunSeconds;
      r.detail += (r.detail.empty() ? "" : "; ") +
                  run_summary(kind == ControllerKind::Strict ? "str" : "agg", t);
    }
    if (!paper_params) r.detail += "; scenario parameters differ from v_nom=0.5, k=0.75, eps=0.1";
    r.passed = ok;
    record(r, start);
  }
  if (wanted(8)) {
    const auto start = Clock::now();
    CriterionResult r = titled(8, "aggregate completes in no more steps than strict");
    const TrajectoryLog& s = get(ControllerKind::Strict).log;
    const TrajectoryLog& a = get(ControllerKind::Aggregate).log;
    r.passed = s.completed() && a.completed() && a.steps() <= s.steps();
    r.detail = "agg " + std::to_string(a.steps()) + " steps, str " + std::to_string(s.steps());
    record(r, start);
  }
  if (wanted(9)) {
    const auto start = Clock::now();
    CriterionResult r = titled(9, "input chattering across eigenvalue merges");
    const TrajectoryLog& a = get(ControllerKind::Aggregate).log;
    const TrajectoryLog& d = get(ControllerKind::Discontinuous).log;
    const JumpMetrics ja = input_jumps(a, scenario.dt, kSeparatedGap);
    const JumpMetrics jd = input_jumps(d, scenario.dt, kSeparatedGap);
    const double bound_rate = kSmoothRateFactor * ja.smooth_rate;
    const bool merged = ja.min_gap <= kMergeGap;
    r.passed = merged && ja.smooth_steps > 0 && jd.chi >= kChatterRatio * ja.chi &&
               ja.chi <= bound_rate * scenario.dt;
    r.detail = "chi dis " + fmt("%.4f", jd.chi) + ", chi agg " + fmt("%.4f", ja.chi) +
               " (ratio " + fmt("%.1f", ja.chi > 0 ? jd.chi / ja.chi : 0.0) + "); C*dt " +
               fmt("%.4f", bound_rate * scenario.dt) + " from " + std::to_string(ja.smooth_steps) +
               " separated steps; smallest gap " + fmt("%.1e", ja.min_gap);
    record(r, start);
  }
  if (wanted(10)) {
    const auto start = Clock::now();
    CriterionResult r = titled(10, "strict-feasibility probe slack along the mission runs");
    const double s = min_slack(get(ControllerKind::Strict).log);
    const double a = min_slack(get(ControllerKind::Aggregate).log);
    r.passed = s > 0.0 && a > 0.0;
    r.detail = "min slack str " + fmt("%.5f", s) + ", agg " + fmt("%.5f", a);
    record(r, start);
  }
  if (wanted(11)) {
    const auto start = Clock::now();
    CriterionResult r = titled(11, "byte-identical CSV logs on repeated runs");
    Scenario shortened = scenario;
    shortened.max_steps = std::min(scenario.max_steps, kDeterminismSteps);
    bool ok = true;
    for (ControllerKind kind :
         {ControllerKind::Discontinuous, ControllerKind::Strict, ControllerKind::Aggregate}) {
      const bool same = byte_identical_runs(shortened, kind, sp);
      ok = ok && same;
      r.detail += std::string(r.detail.empty() ? "" : ", ") + std::string(short_name(kind)) +
                  (same ? " identical" : " DIFFERS");
    }
    r.detail += " over " + std::to_string(shortened.max_steps) + " steps";
    r.passed = ok;
    record(r, start);
  }
  // Drain runs started for criteria that were not reported.
  for (auto& [kind, f] : pending) {
    if (!done.count(kind)) f.wait();
  }
  return results;
}

std::string format_result(const CriterionResult& r) {
  char head[32];
  std::snprintf(head, sizeof head, "%s  [%2d] ", r.passed ? "PASS" : "FAIL", r.id);
  return head + r.title + ": " + r.detail + " (" + fmt("%.1f", r.seconds) + " s)";
}

}  // namespace netconn
