#include "memwave/presets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

namespace memwave {

namespace {

InitialData from_file(const std::string& path, const Mesh& mesh) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open initial-condition file " + path);
  std::vector<double> us, vs;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double u = 0.0, v = 0.0;
    if (!(row >> u)) throw ConfigError("malformed line in " + path + ": " + line);
    if (!(row >> v)) v = 0.0;
    us.push_back(u);
    vs.push_back(v);
  }
  const auto n = static_cast<std::size_t>(mesh.n_unknowns());
  if (us.size() == n + 1) {
    if (us.front() != 0.0 || vs.front() != 0.0) {
      throw ConfigError("initial data in " + path + " must vanish at x = 0");
    }
    us.erase(us.begin());
    vs.erase(vs.begin());
  }
  if (us.size() != n) {
    throw ConfigError(path + " has " + std::to_string(us.size()) + " rows, expected " +
                      std::to_string(n) + " or " + std::to_string(n + 1));
  }
  InitialData d;
  d.u = Eigen::Map<Vector>(us.data(), static_cast<Eigen::Index>(n));
  d.v = Eigen::Map<Vector>(vs.data(), static_cast<Eigen::Index>(n));
  return d;
}

}  // namespace

InitialData make_initial_data(std::string_view preset, const Mesh& mesh, std::uint64_t seed) {
  const int n = mesh.n_unknowns();
  InitialData d{Vector::Zero(n), Vector::Zero(n)};
  if (preset == "sine") {
    d.u = interpolate(mesh, [](double x) { return std::sin(std::numbers::pi * x / 2.0); });
  } else if (preset == "gaussian") {
    d.u = interpolate(mesh, [](double x) { return std::exp(-std::pow((x - 0.5) / 0.1, 2)); });
  } else if (preset == "zero") {
  } else if (preset == "random") {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int i = 0; i < n; ++i) d.u(i) = dist(rng);
    for (int i = 0; i < n; ++i) d.v(i) = dist(rng);
  } else if (preset.starts_with("file:")) {
    d = from_file(std::string(preset.substr(5)), mesh);
  } else {
    throw ConfigError("unknown initial_condition '" + std::string(preset) + "'");
  }
  return d;
}

double PastHistory::factor(double s) const { return amplitude * std::exp(-rate * s); }

PastHistory make_past_history(std::string_view preset) {
  if (preset == "zero" || preset == "constant") return {std::string(preset), 1.0, 0.0};
  if (preset == "switch-on") return {"switch-on", 0.0, 0.0};
  if (preset == "decaying") return {"decaying", 1.0, 1.0};
  throw ConfigError("unknown past_history '" + std::string(preset) + "'");
}

PastFunction past_function(const PastHistory& past, const Mesh& mesh, const Vector& u_init) {
  // nodal lookup; init_history only evaluates at mesh nodes
  return [past, nodes = mesh.nodes, u_init](double x, double t) {
    const auto it = std::lower_bound(nodes.begin(), nodes.end(), x - 1e-14);
    const auto i = std::distance(nodes.begin(), it);
    const double now = i == 0 ? 0.0 : u_init(i - 1);
    return t == 0.0 ? now : past.factor(t) * now;
  };
}

double past_weight(const Kernel& k, double t, double r, bool derivative) {
  if (k.is_zero()) return 0.0;
  if (k.family() == KernelFamily::exponential) {
    const double base = k.amplitude() * std::exp(-k.rate() * t) / (k.rate() + r);
    return derivative ? -k.rate() * base : base;
  }
  if (r == 0.0) return derivative ? -k.value(t) : k.integrate(t, std::numeric_limits<double>::infinity());
  const double span = truncation_horizon(k, 1e-14);
  const auto f = [&](double s) {
    return (derivative ? k.derivative(s) : k.value(s)) * std::exp(-r * (s - t));
  };
  constexpr int panels = 256;
  double sum = 0.0;
  const double width = span / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = t + p * width;
    sum += boost::math::quadrature::gauss<double, 10>::integrate(f, lo, lo + width);
  }
  return sum;
}

}  // namespace memwave
