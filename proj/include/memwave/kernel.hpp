#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "memwave/types.hpp"

namespace memwave {

enum class KernelFamily { zero, exponential, sampled };

/// Decay-rate bounds zeta0 <= -g'(s)/g(s) <= zeta1.
struct RatioBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Whether a constructor enforces the admissibility conditions or only the
/// structural ones (finite, positive parameters). Lenient kernels exist so
/// that violating kernels can still be reported on or run on request.
enum class Admissibility { enforce, lenient };

/**
 * Relaxation kernel g of the memory term.
 *
 * Three families are supported:
 *  - zero: g == 0, the memoryless limit;
 *  - exponential: g(s) = a exp(-b s);
 *  - sampled: values on a strictly increasing grid starting at 0, with
 *    declared ratio bounds. Between samples the kernel is interpolated
 *    log-linearly (exact for exponentials, preserves positivity); beyond the
 *    last sample it is continued as g(S) exp(-zeta0 (s - S)), which is the
 *    slowest decay the declared bounds allow.
 *
 * Kernels are immutable after construction.
 */
class Kernel {
 public:
  static Kernel zero();
  static Kernel exponential(double amplitude, double rate,
                            Admissibility mode = Admissibility::enforce);
  static Kernel sampled(std::vector<double> s, std::vector<double> g,
                        RatioBounds declared);
  /// Two-column CSV (s, g(s)); '#' lines and a non-numeric header are skipped.
  static Kernel from_csv(const std::filesystem::path& path, RatioBounds declared);

  double value(double s) const;
  double operator()(double s) const { return value(s); }

  /// g'(s). Sampled kernels differentiate the log-linear interpolant, so
  /// -g'/g on a segment is its secant log-slope; at interior samples the two
  /// one-sided values are averaged.
  double derivative(double s) const;

  /// Exact integral of the kernel (as represented) over [from, to]; `to` may
  /// be +infinity.
  double integrate(double from, double to) const;

  /// g0 = integral of g over [0, inf).
  double total_mass() const noexcept { return total_mass_; }
  /// ell = 1 - g0.
  double residual() const noexcept { return 1.0 - total_mass_; }
  RatioBounds ratio_bounds() const noexcept { return bounds_; }
  KernelFamily family() const noexcept { return family_; }
  bool is_zero() const noexcept { return family_ == KernelFamily::zero; }

  /// Exponential parameters; throws KernelError for other families.
  double amplitude() const;
  double rate() const;

  std::span<const double> sample_points() const noexcept { return s_; }
  std::span<const double> sample_values() const noexcept { return g_; }

  std::string describe() const;

 private:
  Kernel() = default;
  std::size_t segment(double s) const;
  double segment_integral(std::size_t i, double from, double to) const;

  KernelFamily family_ = KernelFamily::zero;
  double a_ = 0.0;
  double b_ = 0.0;
  RatioBounds bounds_{};
  double total_mass_ = 0.0;
  std::vector<double> s_;
  std::vector<double> g_;
  std::vector<double> kappa_;  // log-linear decay rate per segment (NaN: linear)
};

struct AssumptionReport {
  bool pass = false;
  double total_mass = 0.0;
  double residual = 0.0;
  /// Observed extrema of -g'(s)/g(s) over the grid points with g(s) > 0.
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double min_ratio_at = 0.0;
  double max_ratio_at = 0.0;
  std::vector<std::string> diagnostics;
};

/// Relative slack applied to the ratio bounds.
inline constexpr double kRatioTolerance = 1e-9;

/**
 * Checks positivity, ell > 0 and the ratio bounds at every grid point.
 * The grid must be nonempty, strictly increasing and start at 0
 * (std::invalid_argument otherwise). A failing kernel yields pass == false
 * together with one diagnostic per violated condition.
 */
AssumptionReport verify_assumptions(const Kernel& k, std::span<const double> s_grid);

/// Convenience grid {0, step, ..., last}.
std::vector<double> uniform_grid(double last, double step);

/// Laplace transform ĝ(lambda) = integral of g(s) exp(-lambda s) ds, Re lambda >= 0.
/// Closed form for the zero and exponential families; composite Gauss-Legendre
/// over the samples plus the analytic transform of the exponential tail for
/// sampled kernels.
Complex laplace_transform(const Kernel& k, Complex lambda, int panels_per_segment = 4);

/// Family-independent quadrature route: composite Gauss-Legendre on [0, horizon]
/// with `panels` panels, plus the tail bound tail_mass(k, horizon) folded in
/// with the factor exp(-lambda horizon). Used to cross-check closed forms.
Complex laplace_transform_quadrature(const Kernel& k, Complex lambda, double horizon,
                                     int panels);

/// Bound on the memory mass beyond the horizon S:
/// min(exact tail integral, g(S)/zeta0).
double tail_mass(const Kernel& k, double horizon);

/// Smallest horizon S (to relative precision 1e-12) with tail_mass(k, S) <= tol.
double truncation_horizon(const Kernel& k, double tol);

}  // namespace memwave
