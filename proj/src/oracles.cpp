#include "netconn/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace netconn {

double convex_hull_pairing(const Eigen::MatrixXd& rate, const std::vector<Eigen::VectorXd>& vectors,
                           const Eigen::VectorXd& weights) {
  if (static_cast<Eigen::Index>(vectors.size()) != weights.size()) {
    throw std::invalid_argument("convex_hull_pairing: one weight per vector required");
  }
  double out = 0.0;
  for (std::size_t k = 0; k < vectors.size(); ++k) {
    out += weights(static_cast<Eigen::Index>(k)) * vectors[k].dot(rate * vectors[k]);
  }
  return out;
}

Eigen::VectorXd random_normal(std::mt19937_64& rng, Eigen::Index size) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(size);
  for (Eigen::Index i = 0; i < size; ++i) v(i) = normal(rng);
  return v;
}

std::vector<double> oracle_convex_hull_min(const NetworkAnalysis& a,
                                           const Eigen::Ref<const Eigen::VectorXd>& u, int m,
                                           const std::vector<int>& checkpoints,
                                           std::mt19937_64& rng) {
  if (checkpoints.empty() || checkpoints.front() < 1 ||
      !std::is_sorted(checkpoints.begin(), checkpoints.end())) {
    throw std::invalid_argument("oracle_convex_hull_min: checkpoints must be ascending and >= 1");
  }
  const Eigen::MatrixXd basis = merged_basis(a.spectrum, m).basis;
  // Work in basis coordinates: w^T (B^T R B) w = (Bw)^T R (Bw), |Bw| = |w|.
  const Eigen::MatrixXd reduced = basis.transpose() * a.graph.laplacian_rate(u) * basis;
  const Eigen::Index k = reduced.rows();

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> terms(1, 3);
  auto global = [&] { return random_normal(rng, k).normalized(); };

  // The running minimum is driven by single rank-one samples; half of those
  // perturb the incumbent with a self-adjusting radius so the estimate keeps
  // tightening in higher-dimensional spans.
  Eigen::VectorXd best_dir = global();
  double best = best_dir.dot(reduced * best_dir);
  double radius = 0.3;

  std::vector<double> out;
  out.reserve(checkpoints.size());
  std::size_t next = 0;
  for (int s = 1; s <= checkpoints.back(); ++s) {
    const bool local = (s % 2 == 0);
    Eigen::VectorXd head = local ? (best_dir + radius * random_normal(rng, k)).normalized() : global();

    const int count = terms(rng);
    std::vector<Eigen::VectorXd> dirs{head};
    Eigen::VectorXd weights(count);
    for (int t = 1; t < count; ++t) dirs.push_back(global());
    for (int t = 0; t < count; ++t) weights(t) = -std::log(1.0 - unit(rng));
    weights /= weights.sum();
    const double value = convex_hull_pairing(reduced, dirs, weights);

    if (count == 1 && value < best) {
      best_dir = head;
      if (local) radius = std::min(0.5, radius * 1.5);
    } else if (local) {
      radius = std::max(1e-7, radius * 0.97);
    }
    best = std::min(best, value);
    while (next < checkpoints.size() && checkpoints[next] == s) {
      out.push_back(best);
      ++next;
    }
  }
  return out;
}

double oracle_convex_hull_min(const NetworkAnalysis& a, const Eigen::Ref<const Eigen::VectorXd>& u,
                              int m, int samples, std::mt19937_64& rng) {
  return oracle_convex_hull_min(a, u, m, std::vector<int>{samples}, rng).back();
}

QpSolution brute_force_qp(const QuadraticProgram& qp) {
  const Eigen::Index n = qp.hessian.rows();
  const Eigen::Index rows = qp.a.rows();
  if (rows > 20) throw std::invalid_argument("brute_force_qp: too many constraints to enumerate");
  constexpr double tol = 1e-9;

  QpSolution best;
  best.value = std::numeric_limits<double>::infinity();
  for (unsigned mask = 0; mask < (1u << rows); ++mask) {
    std::vector<Eigen::Index> active;
    for (Eigen::Index j = 0; j < rows; ++j) {
      if (mask & (1u << j)) active.push_back(j);
    }
    const auto k = static_cast<Eigen::Index>(active.size());
    if (k > n) continue;

    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + k, n + k);
    Eigen::VectorXd rhs(n + k);
    kkt.topLeftCorner(n, n) = qp.hessian;
    rhs.head(n) = -qp.linear;
    for (Eigen::Index t = 0; t < k; ++t) {
      kkt.block(0, n + t, n, 1) = qp.a.row(active[t]).transpose();
      kkt.block(n + t, 0, 1, n) = qp.a.row(active[t]);
      rhs(n + t) = qp.b(active[t]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
    if (!lu.isInvertible()) continue;
    const Eigen::VectorXd sol = lu.solve(rhs);

    const Eigen::VectorXd u = sol.head(n);
    const Eigen::VectorXd d = sol.tail(k);
    if (k > 0 && d.minCoeff() < -tol) continue;
    if (rows > 0 && (qp.a * u - qp.b).maxCoeff() > tol) continue;

    const double value = qp.value(u);
    if (value < best.value) {
      best.u = u;
      best.duals = Eigen::VectorXd::Zero(rows);
      for (Eigen::Index t = 0; t < k; ++t) best.duals(active[t]) = std::max(0.0, d(t));
      best.value = value;
    }
  }
  if (!std::isfinite(best.value)) throw std::runtime_error("brute_force_qp: no KKT point found");
  return best;
}

Eigen::VectorXd central_difference_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                            const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe(i) = x(i) + h;
    const double up = f(probe);
    probe(i) = x(i) - h;
    const double down = f(probe);
    probe(i) = x(i);
    g(i) = (up - down) / (2.0 * h);
  }
  return g;
}

NetworkState random_connected_state(std::mt19937_64& rng, int robots, const ProximityConfig& cfg,
                                    double spread, double min_lambda2) {
  std::uniform_real_distribution<double> coord(-0.5 * spread, 0.5 * spread);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    Eigen::VectorXd p(2 * robots);
    for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = coord(rng);
    NetworkState x = NetworkState::uniform(std::move(p), 2);
    if (algebraic_connectivity(x, cfg) >= min_lambda2) return x;
  }
  throw std::runtime_error("random_connected_state: no connected draw for " +
                           std::to_string(robots) + " robots in spread " + std::to_string(spread));
}

}  // namespace netconn
