#pragma once

#include <span>
#include <string>
#include <vector>

#include "memwave/dynamics.hpp"

namespace memwave {

struct EnergyRecord {
  double t = 0.0;
  double e_paper = 0.0;    // 1/2 ((M v, v) + (K u, u) + |eta|_M^2)
  double e_hilbert = 0.0;  // 1/2 (ell (K u, u) + (M v, v) + w^2 + |eta|_M^2)
  double dissipation = 0.0;  // 1/2 sum w'_k (K eta_k, eta_k)
  double residual = 0.0;     // (E_n - E_{n-1}) / dt - mean dissipation over the step
};

struct EnergyParts {
  double e_paper = 0.0;
  double e_hilbert = 0.0;
  double dissipation = 0.0;
};

EnergyParts energy_parts(const DafermosModel& model, const State& x);

/// Streaming recorder: feed samples in time order, residuals are formed from
/// consecutive samples.
class EnergyMonitor {
 public:
  void push(double t, const EnergyParts& parts);
  const std::vector<EnergyRecord>& records() const noexcept { return records_; }

  /// True if E_hilbert never grew by more than `tolerance` (relative to E_0).
  bool monotone(double tolerance = 1e-12) const;
  /// Largest |residual|.
  double max_abs_residual() const;

 private:
  std::vector<EnergyRecord> records_;
};

/// Energies of a stored Dafermos trajectory.
std::vector<EnergyRecord> record_energy(const DafermosModel& model, std::span<const double> times,
                                        std::span<const State> trajectory);

struct FitWindow {
  double t_begin = 0.0;
  double t_end = 0.0;
};

/// Default window: drop the first 10% of the horizon.
FitWindow default_window(std::span<const EnergyRecord> records);

struct DecayFit {
  double gamma = 0.0;
  double C = 0.0;
  double r2 = 0.0;
  double gamma_low = 0.0;   // 95% confidence interval from the slope error
  double gamma_high = 0.0;
  int samples = 0;
  bool conclusive = false;  // r2 >= 0.95
};

inline constexpr double kMinR2 = 0.95;

/// Least squares log E_hilbert = log C - 2 gamma t over the window.
/// Needs >= 10 samples; throws Error on nonpositive energy.
DecayFit fit_decay(std::span<const EnergyRecord> records, FitWindow window);

}  // namespace memwave
