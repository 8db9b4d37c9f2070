#include "memwave/energy.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/students_t.hpp>

namespace memwave {

EnergyParts energy_parts(const DafermosModel& model, const State& x) {
  const auto& ops = model.ops();
  const double Kuu = x.u.dot(ops.K * x.u);
  const double Mvv = x.v.dot(ops.M * x.v);
  const double w = x.boundary_velocity();
  const double mem = memory_norm_squared(x.eta, model.grid(), ops);
  EnergyParts p;
  p.e_paper = 0.5 * (Mvv + Kuu + mem);
  p.e_hilbert = 0.5 * (model.ell() * Kuu + Mvv + ops.boundary_mass * w * w + mem);
  p.dissipation = memory_dissipation(x.eta, model.grid(), ops);
  return p;
}

void EnergyMonitor::push(double t, const EnergyParts& parts) {
  EnergyRecord r{t, parts.e_paper, parts.e_hilbert, parts.dissipation, 0.0};
  if (!records_.empty()) {
    const auto& prev = records_.back();
    const double dt = t - prev.t;
    if (!(dt > 0.0)) throw Error("energy samples must be strictly increasing in time");
    r.residual = (r.e_hilbert - prev.e_hilbert) / dt - 0.5 * (r.dissipation + prev.dissipation);
  }
  records_.push_back(r);
}

bool EnergyMonitor::monotone(double tolerance) const {
  if (records_.empty()) return true;
  const double scale = std::max(records_.front().e_hilbert, 1e-300);
  for (std::size_t i = 1; i < records_.size(); ++i) {
    if (records_[i].e_hilbert - records_[i - 1].e_hilbert > tolerance * scale) return false;
  }
  return true;
}

double EnergyMonitor::max_abs_residual() const {
  double m = 0.0;
  for (const auto& r : records_) m = std::max(m, std::abs(r.residual));
  return m;
}

std::vector<EnergyRecord> record_energy(const DafermosModel& model, std::span<const double> times,
                                        std::span<const State> trajectory) {
  if (times.size() != trajectory.size()) throw ShapeError("times and states differ in length");
  EnergyMonitor mon;
  for (std::size_t i = 0; i < times.size(); ++i) mon.push(times[i], energy_parts(model, trajectory[i]));
  return mon.records();
}

FitWindow default_window(std::span<const EnergyRecord> records) {
  if (records.empty()) return {};
  const double t0 = records.front().t;
  const double t1 = records.back().t;
  return {t0 + 0.1 * (t1 - t0), t1};
}

DecayFit fit_decay(std::span<const EnergyRecord> records, FitWindow window) {
  std::vector<double> t, y;
  for (const auto& r : records) {
    if (r.t < window.t_begin || r.t > window.t_end) continue;
    if (!(r.e_hilbert > 0.0)) {
      throw Error("fit_decay: nonpositive energy at t = " + std::to_string(r.t));
    }
    t.push_back(r.t);
    y.push_back(std::log(r.e_hilbert));
  }
  const auto n = static_cast<int>(t.size());
  if (n < 10) throw Error("fit_decay: need at least 10 samples in the window, got " + std::to_string(n));

  double tm = 0.0, ym = 0.0;
  for (int i = 0; i < n; ++i) {
    tm += t[i];
    ym += y[i];
  }
  tm /= n;
  ym /= n;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    stt += (t[i] - tm) * (t[i] - tm);
    sty += (t[i] - tm) * (y[i] - ym);
    syy += (y[i] - ym) * (y[i] - ym);
  }
  const double slope = sty / stt;
  const double icpt = ym - slope * tm;
  double sse = 0.0;
  for (int i = 0; i < n; ++i) {
    const double e = y[i] - (icpt + slope * t[i]);
    sse += e * e;
  }

  DecayFit fit;
  fit.samples = n;
  fit.gamma = -0.5 * slope;
  fit.C = std::exp(icpt);
  // a flat record is fitted exactly
  fit.r2 = syy <= 1e-28 * std::max(1.0, ym * ym) ? 1.0 : 1.0 - sse / syy;
  const double se = std::sqrt(sse / std::max(1, n - 2) / stt);
  const boost::math::students_t dist(std::max(1, n - 2));
  const double q = boost::math::quantile(boost::math::complement(dist, 0.025));
  fit.gamma_low = fit.gamma - 0.5 * q * se;
  fit.gamma_high = fit.gamma + 0.5 * q * se;
  fit.conclusive = fit.r2 >= kMinR2;
  return fit;
}

}  // namespace memwave
