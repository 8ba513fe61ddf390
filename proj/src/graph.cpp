#include "netconn/graph.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace netconn {

NetworkState::NetworkState(Eigen::VectorXd positions, std::vector<int> dims)
    : positions_(std::move(positions)), dims_(std::move(dims)) {
  if (dims_.size() < 2) {
    throw std::invalid_argument("NetworkState: need at least two robots");
  }
  int total = 0;
  offsets_.reserve(dims_.size());
  for (std::size_t r = 0; r < dims_.size(); ++r) {
    if (dims_[r] < 1) {
      throw std::invalid_argument("NetworkState: robot " + std::to_string(r) +
                                  " has non-positive dimension");
    }
    offsets_.push_back(total);
    for (int c = 0; c < dims_[r]; ++c) owners_.push_back(static_cast<int>(r));
    total += dims_[r];
  }
  if (total != positions_.size()) {
    throw std::invalid_argument("NetworkState: positions have length " +
                                std::to_string(positions_.size()) + ", dims sum to " +
                                std::to_string(total));
  }
  if (!positions_.allFinite()) {
    throw std::invalid_argument("NetworkState: non-finite position");
  }
}

NetworkState NetworkState::uniform(Eigen::VectorXd positions, int dim) {
  if (dim < 1 || positions.size() % dim != 0) {
    throw std::invalid_argument("NetworkState: length not divisible by dimension");
  }
  std::vector<int> dims(static_cast<std::size_t>(positions.size() / dim), dim);
  return NetworkState(std::move(positions), std::move(dims));
}

NetworkState NetworkState::with_positions(Eigen::VectorXd positions) const {
  return NetworkState(std::move(positions), dims_);
}

void ProximityConfig::validate() const {
  if (!(range > 0.0) || !(sigma > 0.0) || !(taper > 0.0) || !(taper < range)) {
    throw std::invalid_argument(
        "ProximityConfig: require range > 0, sigma > 0, 0 < taper < range");
  }
}

namespace {

// 1 on the inner side of the band, 0 outside; cubic smoothstep in between.
double cutoff(double d, const ProximityConfig& cfg) {
  const double start = cfg.range - cfg.taper;
  if (d <= start) return 1.0;
  if (d >= cfg.range) return 0.0;
  const double t = (d - start) / cfg.taper;
  return 1.0 - t * t * (3.0 - 2.0 * t);
}

double cutoff_derivative(double d, const ProximityConfig& cfg) {
  const double start = cfg.range - cfg.taper;
  if (d <= start || d >= cfg.range) return 0.0;
  const double t = (d - start) / cfg.taper;
  return -6.0 * t * (1.0 - t) / cfg.taper;
}

}  // namespace

double edge_weight(double d, const ProximityConfig& cfg) {
  if (d >= cfg.range) return 0.0;
  return std::exp(-d * d / (2.0 * cfg.sigma * cfg.sigma)) * cutoff(d, cfg);
}

double edge_weight_derivative(double d, const ProximityConfig& cfg) {
  if (d >= cfg.range) return 0.0;
  const double s2 = cfg.sigma * cfg.sigma;
  const double g = std::exp(-d * d / (2.0 * s2));
  return g * (-d / s2 * cutoff(d, cfg) + cutoff_derivative(d, cfg));
}

Eigen::MatrixXd ComponentJacobian::dense() const {
  const auto n = edge_rates.size();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  accumulate(out, 1.0);
  return out;
}

double ComponentJacobian::quadratic_form(const Eigen::Ref<const Eigen::VectorXd>& v) const {
  double acc = 0.0;
  for (Eigen::Index q = 0; q < edge_rates.size(); ++q) {
    const double diff = v(robot) - v(q);
    acc += edge_rates(q) * diff * diff;
  }
  return acc;
}

Eigen::MatrixXd ComponentJacobian::project(const Eigen::Ref<const Eigen::MatrixXd>& basis) const {
  const auto k = basis.cols();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index q = 0; q < edge_rates.size(); ++q) {
    if (edge_rates(q) == 0.0) continue;
    const Eigen::RowVectorXd diff = basis.row(robot) - basis.row(q);
    out.noalias() += edge_rates(q) * diff.transpose() * diff;
  }
  return out;
}

void ComponentJacobian::accumulate(Eigen::Ref<Eigen::MatrixXd> target, double scale) const {
  const int p = robot;
  for (Eigen::Index q = 0; q < edge_rates.size(); ++q) {
    const double a = scale * edge_rates(q);
    if (a == 0.0) continue;
    target(p, p) += a;
    target(q, q) += a;
    target(p, q) -= a;
    target(q, p) -= a;
  }
}

Eigen::MatrixXd GraphEval::laplacian_rate(const Eigen::Ref<const Eigen::VectorXd>& u) const {
  if (u.size() != static_cast<Eigen::Index>(jacobians.size())) {
    throw std::invalid_argument("laplacian_rate: input has length " + std::to_string(u.size()) +
                                ", state has " + std::to_string(jacobians.size()) +
                                " components");
  }
  const auto n = laplacian.rows();
  Eigen::MatrixXd rate = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < jacobians.size(); ++i) {
    jacobians[i].accumulate(rate, u(static_cast<Eigen::Index>(i)));
  }
  return rate;
}

GraphEval evaluate_graph(const NetworkState& x, const ProximityConfig& cfg) {
  cfg.validate();
  if (!x.positions().allFinite()) {
    throw std::invalid_argument("evaluate_graph: non-finite position");
  }
  const int n = x.robots();
  GraphEval g;
  g.adjacency = Eigen::MatrixXd::Zero(n, n);
  g.jacobians.resize(static_cast<std::size_t>(x.size()));
  for (int i = 0; i < x.size(); ++i) {
    g.jacobians[static_cast<std::size_t>(i)].robot = x.owner(i);
    g.jacobians[static_cast<std::size_t>(i)].edge_rates = Eigen::VectorXd::Zero(n);
  }

  for (int p = 0; p < n; ++p) {
    for (int q = p + 1; q < n; ++q) {
      if (x.dim(p) != x.dim(q)) {
        throw std::invalid_argument("evaluate_graph: robots " + std::to_string(p) + " and " +
                                    std::to_string(q) + " live in different dimensions");
      }
      const Eigen::VectorXd diff = x.robot(p) - x.robot(q);
      const double d = diff.norm();
      const double w = edge_weight(d, cfg);
      g.adjacency(p, q) = w;
      g.adjacency(q, p) = w;
      if (d == 0.0) continue;  // derivative vanishes at coincidence
      const double dw = edge_weight_derivative(d, cfg);
      if (dw == 0.0) continue;
      for (int c = 0; c < x.dim(p); ++c) {
        const double slope = dw * diff(c) / d;
        g.jacobians[static_cast<std::size_t>(x.offset(p) + c)].edge_rates(q) = slope;
        g.jacobians[static_cast<std::size_t>(x.offset(q) + c)].edge_rates(p) = -slope;
      }
    }
  }

  g.laplacian = -g.adjacency;
  g.laplacian.diagonal() = g.adjacency.rowwise().sum();
  return g;
}

}  // namespace netconn
