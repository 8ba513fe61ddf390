#include "netconn/scenario.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace netconn {

void Scenario::validate() const {
  proximity.validate();
  barrier.validate();
  if (!(dt > 0.0)) throw ScenarioError("scenario: dt must be positive");
  if (max_steps < 0) throw ScenarioError("scenario: max_steps must be nonnegative");
  base_task().validate(initial);
  if (!targets.allFinite()) throw ScenarioError("scenario: non-finite target");

  std::set<int> seen;
  for (int r : priority_order) {
    if (r < 0 || r >= initial.robots() || !seen.insert(r).second) {
      throw ScenarioError("scenario: priority order must list distinct robots in [0, " +
                          std::to_string(initial.robots()) + ")");
    }
  }
  const double lambda2 = algebraic_connectivity(initial, proximity);
  if (lambda2 < barrier.epsilon) {
    throw ScenarioError("scenario: initial algebraic connectivity " + std::to_string(lambda2) +
                        " is below epsilon " + std::to_string(barrier.epsilon));
  }
}

PriorityTask Scenario::base_task() const {
  PriorityTask t;
  t.targets = targets;
  t.reached.assign(static_cast<std::size_t>(initial.robots()), false);
  t.target_radius = target_radius;
  t.v_nom = v_nom;
  t.k_frac = k_frac;
  return t;
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct Entry {
  std::string value;
  int line = 0;
};

class Reader {
 public:
  Reader(std::map<std::string, Entry> entries, std::string source)
      : entries_(std::move(entries)), source_(std::move(source)) {}

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  std::vector<double> reals(const std::string& key) const {
    const Entry& e = entries_.at(key);
    std::istringstream in(e.value);
    std::vector<double> out;
    std::string token;
    while (in >> token) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != token.size()) fail(e.line, key + ": '" + token + "' is not a number");
      out.push_back(v);
    }
    return out;
  }

  double real(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    const auto v = reals(key);
    if (v.size() != 1) fail(entries_.at(key).line, key + ": expected a single value");
    return v.front();
  }

  int integer(const std::string& key, int fallback) const {
    if (!has(key)) return fallback;
    const double v = real(key, 0.0);
    if (v != static_cast<double>(static_cast<long long>(v))) {
      fail(entries_.at(key).line, key + ": expected an integer");
    }
    return static_cast<int>(v);
  }

  [[noreturn]] void fail(int line, const std::string& what) const {
    throw ScenarioError(source_ + ":" + std::to_string(line) + ": " + what);
  }

 private:
  std::map<std::string, Entry> entries_;
  std::string source_;
};

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "dim",     "positions", "targets", "priority", "range", "sigma",         "taper",
      "epsilon", "alpha",     "v_nom",   "k",        "dt",    "target_radius", "max_steps"};
  return keys;
}

}  // namespace

Scenario parse_scenario(std::istream& in, const std::string& source) {
  std::map<std::string, Entry> entries;
  std::string raw;
  for (int line = 1; std::getline(in, raw); ++line) {
    const std::string text = trim(raw.substr(0, raw.find('#')));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ScenarioError(source + ":" + std::to_string(line) + ": expected 'key = value'");
    }
    const std::string key = trim(text.substr(0, eq));
    if (!known_keys().count(key)) {
      throw ScenarioError(source + ":" + std::to_string(line) + ": unknown key '" + key + "'");
    }
    if (entries.count(key)) {
      throw ScenarioError(source + ":" + std::to_string(line) + ": duplicate key '" + key + "'");
    }
    entries[key] = Entry{trim(text.substr(eq + 1)), line};
  }

  const Reader r(std::move(entries), source);
  for (const char* required : {"positions", "targets"}) {
    if (!r.has(required)) throw ScenarioError(source + ": missing required key '" + required + "'");
  }

  Scenario s;
  const int dim = r.integer("dim", 2);
  const auto pos = r.reals("positions");
  const auto tgt = r.reals("targets");
  if (dim < 1 || pos.size() % static_cast<std::size_t>(dim) != 0) {
    throw ScenarioError(source + ": positions length " + std::to_string(pos.size()) +
                        " is not a multiple of dim " + std::to_string(dim));
  }
  if (tgt.size() != pos.size()) {
    throw ScenarioError(source + ": targets length " + std::to_string(tgt.size()) +
                        " differs from positions length " + std::to_string(pos.size()));
  }
  try {
    s.initial = NetworkState::uniform(
        Eigen::Map<const Eigen::VectorXd>(pos.data(), static_cast<Eigen::Index>(pos.size())), dim);
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(source + ": " + e.what());
  }
  s.targets = Eigen::Map<const Eigen::VectorXd>(tgt.data(), static_cast<Eigen::Index>(tgt.size()));

  if (r.has("priority")) {
    for (double v : r.reals("priority")) s.priority_order.push_back(static_cast<int>(v));
  } else {
    s.priority_order.resize(static_cast<std::size_t>(s.initial.robots()));
    std::iota(s.priority_order.begin(), s.priority_order.end(), 0);
  }

  s.proximity.range = r.real("range", s.proximity.range);
  s.proximity.sigma = r.real("sigma", s.proximity.sigma);
  s.proximity.taper = r.real("taper", s.proximity.taper);
  s.barrier.epsilon = r.real("epsilon", s.barrier.epsilon);
  s.barrier.alpha_slope = r.real("alpha", s.barrier.alpha_slope);
  s.v_nom = r.real("v_nom", s.v_nom);
  s.k_frac = r.real("k", s.k_frac);
  s.target_radius = r.real("target_radius", s.target_radius);
  s.dt = r.real("dt", s.dt);
  s.max_steps = r.integer("max_steps", s.max_steps);

  try {
    s.validate();
  } catch (const ScenarioError& e) {
    throw ScenarioError(source + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(source + ": " + e.what());
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file " + path.string());
  return parse_scenario(in, path.string());
}

std::string format_scenario(const Scenario& s) {
  auto real = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  auto list = [&](const Eigen::VectorXd& v) {
    std::string out;
    for (Eigen::Index i = 0; i < v.size(); ++i) out += (i ? " " : "") + real(v(i));
    return out;
  };
  std::ostringstream out;
  out << "dim = " << s.initial.dim(0) << "\n";
  out << "positions = " << list(s.initial.positions()) << "\n";
  out << "targets = " << list(s.targets) << "\n";
  out << "priority =";
  for (int r : s.priority_order) out << " " << r;
  out << "\n";
  out << "range = " << real(s.proximity.range) << "\n";
  out << "sigma = " << real(s.proximity.sigma) << "\n";
  out << "taper = " << real(s.proximity.taper) << "\n";
  out << "epsilon = " << real(s.barrier.epsilon) << "\n";
  out << "alpha = " << real(s.barrier.alpha_slope) << "\n";
  out << "v_nom = " << real(s.v_nom) << "\n";
  out << "k = " << real(s.k_frac) << "\n";
  out << "target_radius = " << real(s.target_radius) << "\n";
  out << "dt = " << real(s.dt) << "\n";
  out << "max_steps = " << s.max_steps << "\n";
  return out.str();
}

}  // namespace netconn
