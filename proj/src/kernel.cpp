#include "memwave/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

namespace memwave {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Gauss = boost::math::quadrature::gauss<double, 10>;

template <class F>
auto gauss_panels(F&& f, double from, double to, int panels) {
  using R = decltype(f(from));
  R sum{};
  const double width = (to - from) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = from + p * width;
    sum += Gauss::integrate(f, lo, lo + width);
  }
  return sum;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace

Kernel Kernel::zero() {
  Kernel k;
  k.family_ = KernelFamily::zero;
  return k;
}

Kernel Kernel::exponential(double amplitude, double rate, Admissibility mode) {
  if (!std::isfinite(amplitude) || !std::isfinite(rate) || amplitude <= 0.0 || rate <= 0.0) {
    throw KernelError("exponential kernel needs a > 0 and b > 0 (got a=" + fmt(amplitude) +
                      ", b=" + fmt(rate) + ")");
  }
  if (mode == Admissibility::enforce && amplitude / rate >= 1.0) {
    throw KernelError("ℓ ≤ 0: exponential kernel has g0 = a/b = " + fmt(amplitude / rate) +
                      " >= 1");
  }
  Kernel k;
  k.family_ = KernelFamily::exponential;
  k.a_ = amplitude;
  k.b_ = rate;
  k.bounds_ = {rate, rate};
  k.total_mass_ = amplitude / rate;
  return k;
}

Kernel Kernel::sampled(std::vector<double> s, std::vector<double> g, RatioBounds declared) {
  if (s.size() != g.size() || s.size() < 2) {
    throw KernelError("sampled kernel needs at least two (s, g) pairs of equal length");
  }
  if (s.front() != 0.0) throw KernelError("sampled kernel must start at s = 0");
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!std::isfinite(s[i]) || !std::isfinite(g[i])) {
      throw KernelError("sampled kernel contains non-finite values");
    }
    if (i > 0 && s[i] <= s[i - 1]) {
      throw KernelError("sampled kernel abscissae must be strictly increasing");
    }
  }
  if (!(declared.lower > 0.0) || declared.upper < declared.lower) {
    throw KernelError("sampled kernel needs declared 0 < zeta0 <= zeta1");
  }

  Kernel k;
  k.family_ = KernelFamily::sampled;
  k.bounds_ = declared;
  const std::size_t n = s.size();
  k.kappa_.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    k.kappa_[i] = (g[i] > 0.0 && g[i + 1] > 0.0) ? std::log(g[i] / g[i + 1]) / (s[i + 1] - s[i])
                                                 : std::numeric_limits<double>::quiet_NaN();
  }
  k.s_ = std::move(s);
  k.g_ = std::move(g);
  k.total_mass_ = k.integrate(0.0, kInf);
  return k;
}

Kernel Kernel::from_csv(const std::filesystem::path& path, RatioBounds declared) {
  std::ifstream in(path);
  if (!in) throw KernelError("cannot open kernel file " + path.string());
  std::vector<double> s, g;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double a = 0.0, b = 0.0;
    if (!(row >> a >> b)) {
      if (s.empty() && lineno == 1) continue;  // header
      throw KernelError(path.string() + ":" + std::to_string(lineno) + ": expected two numbers");
    }
    s.push_back(a);
    g.push_back(b);
  }
  return sampled(std::move(s), std::move(g), declared);
}

std::size_t Kernel::segment(double s) const {
  // index i with s_[i] <= s < s_[i+1]; requires s < s_.back()
  const auto it = std::upper_bound(s_.begin(), s_.end(), s);
  return static_cast<std::size_t>(std::distance(s_.begin(), it)) - 1;
}

double Kernel::value(double s) const {
  switch (family_) {
    case KernelFamily::zero:
      return 0.0;
    case KernelFamily::exponential:
      return a_ * std::exp(-b_ * s);
    case KernelFamily::sampled:
      break;
  }
  if (s <= 0.0) return g_.front();
  if (s >= s_.back()) return g_.back() * std::exp(-bounds_.lower * (s - s_.back()));
  const std::size_t i = segment(s);
  const double t = s - s_[i];
  if (std::isnan(kappa_[i])) return g_[i] + (g_[i + 1] - g_[i]) * t / (s_[i + 1] - s_[i]);
  return g_[i] * std::exp(-kappa_[i] * t);
}

double Kernel::derivative(double s) const {
  switch (family_) {
    case KernelFamily::zero:
      return 0.0;
    case KernelFamily::exponential:
      return -b_ * a_ * std::exp(-b_ * s);
    case KernelFamily::sampled:
      break;
  }
  if (s > s_.back()) return -bounds_.lower * value(s);
  const std::size_t last = s_.size() - 2;
  const std::size_t i = s <= 0.0 ? 0 : (s == s_.back() ? last : segment(s));
  const auto one_sided = [&](std::size_t j, double x) {
    if (std::isnan(kappa_[j])) return (g_[j + 1] - g_[j]) / (s_[j + 1] - s_[j]);
    return -kappa_[j] * g_[j] * std::exp(-kappa_[j] * (x - s_[j]));
  };
  // interior sample: mean of the two one-sided slopes of the interpolant
  if (s > 0.0 && s == s_[i] && i > 0) return 0.5 * (one_sided(i - 1, s) + one_sided(i, s));
  return one_sided(i, std::max(s, 0.0));
}

double Kernel::segment_integral(std::size_t i, double from, double to) const {
  if (std::isnan(kappa_[i])) {
    const double h = s_[i + 1] - s_[i];
    const auto lin = [&](double x) { return g_[i] + (g_[i + 1] - g_[i]) * (x - s_[i]) / h; };
    return 0.5 * (lin(from) + lin(to)) * (to - from);
  }
  const double kap = kappa_[i];
  if (std::abs(kap) < 1e-14) return g_[i] * (to - from);
  return g_[i] * (std::exp(-kap * (from - s_[i])) - std::exp(-kap * (to - s_[i]))) / kap;
}

double Kernel::integrate(double from, double to) const {
  from = std::max(from, 0.0);
  if (!(to > from)) return 0.0;
  switch (family_) {
    case KernelFamily::zero:
      return 0.0;
    case KernelFamily::exponential: {
      const double upper = std::isinf(to) ? 0.0 : std::exp(-b_ * to);
      return (a_ / b_) * (std::exp(-b_ * from) - upper);
    }
    case KernelFamily::sampled:
      break;
  }
  double sum = 0.0;
  const double last = s_.back();
  if (from < last) {
    const double end = std::min(to, last);
    for (std::size_t i = segment(from); i + 1 < s_.size() && s_[i] < end; ++i) {
      const double lo = std::max(from, s_[i]);
      const double hi = std::min(end, s_[i + 1]);
      if (hi > lo) sum += segment_integral(i, lo, hi);
    }
  }
  if (to > last) {
    const double lo = std::max(from, last);
    const double z = bounds_.lower;
    const double upper = std::isinf(to) ? 0.0 : std::exp(-z * (to - last));
    sum += g_.back() * (std::exp(-z * (lo - last)) - upper) / z;
  }
  return sum;
}

double Kernel::amplitude() const {
  if (family_ != KernelFamily::exponential) throw KernelError("kernel is not exponential");
  return a_;
}

double Kernel::rate() const {
  if (family_ != KernelFamily::exponential) throw KernelError("kernel is not exponential");
  return b_;
}

std::string Kernel::describe() const {
  switch (family_) {
    case KernelFamily::zero:
      return "zero";
    case KernelFamily::exponential:
      return "exponential(a=" + fmt(a_) + ", b=" + fmt(b_) + ")";
    case KernelFamily::sampled:
      return "sampled(" + std::to_string(s_.size()) + " samples, zeta0=" + fmt(bounds_.lower) +
             ", zeta1=" + fmt(bounds_.upper) + ")";
  }
  return {};
}

std::vector<double> uniform_grid(double last, double step) {
  std::vector<double> grid;
  const auto n = static_cast<long>(std::floor(last / step + 1e-9));
  grid.reserve(static_cast<std::size_t>(n) + 1);
  for (long i = 0; i <= n; ++i) grid.push_back(static_cast<double>(i) * step);
  return grid;
}

AssumptionReport verify_assumptions(const Kernel& k, std::span<const double> s_grid) {
  if (s_grid.empty() || s_grid.front() != 0.0) {
    throw std::invalid_argument("assumption grid must be nonempty and start at 0");
  }
  for (std::size_t i = 1; i < s_grid.size(); ++i) {
    if (!(s_grid[i] > s_grid[i - 1])) {
      throw std::invalid_argument("assumption grid must be strictly increasing");
    }
  }

  AssumptionReport rep;
  rep.total_mass = k.total_mass();
  rep.residual = k.residual();
  rep.min_ratio = std::numeric_limits<double>::infinity();
  rep.max_ratio = -std::numeric_limits<double>::infinity();

  if (!(rep.residual > 0.0)) {
    rep.diagnostics.push_back("ℓ ≤ 0: g0 = " + fmt(rep.total_mass) + " >= 1");
  }

  const auto [zeta0, zeta1] = k.ratio_bounds();
  bool negative = false, lower_violated = false, upper_violated = false, flat_zero = false;
  double lower_at = 0.0, upper_at = 0.0;
  for (double s : s_grid) {
    const double g = k.value(s);
    const double dg = k.derivative(s);
    if (g < 0.0) {
      if (!negative) rep.diagnostics.push_back("g(s) < 0 at s = " + fmt(s));
      negative = true;
      continue;
    }
    if (g == 0.0) {
      if (dg != 0.0 && !flat_zero) {
        rep.diagnostics.push_back("g(s) = 0 with g'(s) != 0 at s = " + fmt(s));
        flat_zero = true;
      }
      continue;
    }
    const double ratio = -dg / g;
    if (ratio < rep.min_ratio) {
      rep.min_ratio = ratio;
      rep.min_ratio_at = s;
    }
    if (ratio > rep.max_ratio) {
      rep.max_ratio = ratio;
      rep.max_ratio_at = s;
    }
    if (k.is_zero()) continue;
    if (ratio < zeta0 * (1.0 - kRatioTolerance) && !lower_violated) {
      lower_violated = true;
      lower_at = s;
    }
    if (ratio > zeta1 * (1.0 + kRatioTolerance) && !upper_violated) {
      upper_violated = true;
      upper_at = s;
    }
  }
  if (!std::isfinite(rep.min_ratio)) {
    rep.min_ratio = rep.max_ratio = 0.0;  // g vanishes on the whole grid
  }
  if (lower_violated) {
    rep.diagnostics.push_back("decay lower bound violated: -g'/g = " + fmt(rep.min_ratio) +
                              " < zeta0 = " + fmt(zeta0) + " (first at s = " + fmt(lower_at) +
                              "); no zeta0 > 0 holds if the ratio keeps falling");
  }
  if (upper_violated) {
    rep.diagnostics.push_back("decay upper bound violated: -g'/g = " + fmt(rep.max_ratio) +
                              " > zeta1 = " + fmt(zeta1) + " (first at s = " + fmt(upper_at) +
                              ")");
  }

  if (k.family() == KernelFamily::sampled) {
    // total mass (exact integral of the interpolant) against an independent
    // Gauss-Legendre evaluation over the sampled range
    const auto pts = k.sample_points();
    double quad = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      quad += gauss_panels([&](double x) { return k.value(x); }, pts[i], pts[i + 1], 2);
    }
    quad += k.integrate(pts.back(), kInf);
    if (std::abs(quad - k.total_mass()) > 1e-8 * std::max(1.0, k.total_mass())) {
      rep.diagnostics.push_back("total mass " + fmt(k.total_mass()) +
                                " disagrees with quadrature " + fmt(quad));
    }
  }

  rep.pass = rep.diagnostics.empty();
  return rep;
}

Complex laplace_transform(const Kernel& k, Complex lambda, int panels_per_segment) {
  if (lambda.real() < 0.0) throw std::invalid_argument("laplace_transform needs Re lambda >= 0");
  switch (k.family()) {
    case KernelFamily::zero:
      return {0.0, 0.0};
    case KernelFamily::exponential:
      return k.amplitude() / (k.rate() + lambda);
    case KernelFamily::sampled:
      break;
  }
  const auto pts = k.sample_points();
  const auto f = [&](double s) { return k.value(s) * std::exp(-lambda * s); };
  Complex sum{};
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    sum += gauss_panels(f, pts[i], pts[i + 1], panels_per_segment);
  }
  // exponential continuation g(S) exp(-zeta0 (s - S)) transforms exactly
  const double last = pts.back();
  sum += k.sample_values().back() * std::exp(-lambda * last) / (k.ratio_bounds().lower + lambda);
  return sum;
}

Complex laplace_transform_quadrature(const Kernel& k, Complex lambda, double horizon,
                                     int panels) {
  if (lambda.real() < 0.0) throw std::invalid_argument("laplace_transform needs Re lambda >= 0");
  const auto f = [&](double s) { return k.value(s) * std::exp(-lambda * s); };
  Complex sum = gauss_panels(f, 0.0, horizon, panels);
  // |tail| <= tail_mass; folding it in with the phase at the horizon is exact
  // for exponential kernels and a certified bound otherwise
  const double tail = tail_mass(k, horizon);
  if (tail > 0.0 && k.value(horizon) > 0.0) {
    const double rate = k.value(horizon) / tail;
    sum += k.value(horizon) * std::exp(-lambda * horizon) / (rate + lambda);
  }
  return sum;
}

double tail_mass(const Kernel& k, double horizon) {
  if (horizon <= 0.0) return k.total_mass();
  if (k.is_zero()) return 0.0;
  const double exact = k.integrate(horizon, kInf);
  const double bound = k.value(horizon) / k.ratio_bounds().lower;
  return std::min(exact, bound);
}

double truncation_horizon(const Kernel& k, double tol) {
  if (tail_mass(k, 0.0) <= tol) return 0.0;
  if (k.family() == KernelFamily::exponential) {
    return std::log(k.total_mass() / tol) / k.rate();
  }
  double lo = 0.0, hi = 1.0;
  while (tail_mass(k, hi) > tol) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) throw KernelError("kernel tail does not fall below " + fmt(tol));
  }
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    (tail_mass(k, mid) > tol ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace memwave
