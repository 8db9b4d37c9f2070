#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "memwave/history.hpp"
#include "memwave/kernel.hpp"

namespace memwave {

struct KernelConfig {
  std::string type;  // exponential | sampled | zero
  double a = 0.0;
  double b = 0.0;
  std::string file;
  double zeta0 = 0.0;
  double zeta1 = 0.0;
};

/**
 * Run configuration. Text form (sections and keys; anything else is an error):
 *
 *   [kernel]   type, a, b, file, zeta0, zeta1
 *   [mesh]     n_cells
 *   [history]  s_max (auto | number), s_nodes, past_history, grading, stagger
 *   [time]     formulation, dt (auto | number), t_final, initial_condition, seed
 *   [analysis] beta_max (auto | number), sweep_points, fit_skip, dense_limit, threads
 *   [triad]    dt_convolution, dt_prony, tolerance, prony_tolerance
 *   [output]   dir
 */
struct RunConfig {
  KernelConfig kernel;
  int n_cells = 32;

  std::optional<double> s_max;
  int s_nodes = 64;
  std::string past_history = "zero";
  double grading = 100.0;
  double stagger = 0.7;

  std::string formulation = "dafermos";
  std::optional<double> dt;  // unset: h / 2
  double t_final = 20.0;
  std::string initial_condition = "sine";
  std::uint64_t seed = 0;

  std::optional<double> beta_max;  // unset: 5 max |Im lambda|
  int sweep_points = 64;
  double fit_skip = 0.1;  // fraction of the horizon dropped before fitting
  int dense_limit = 4000;
  unsigned threads = 1;

  std::optional<double> dt_convolution;
  std::optional<double> dt_prony;
  double triad_tolerance = 1e-3;
  double prony_tolerance = 1e-6;

  std::string output_dir = "out";
  std::filesystem::path base_dir;  // relative file paths resolve against this

  double resolved_dt() const { return dt ? *dt : 0.5 / n_cells; }
  HistoryOptions history_options() const;
};

/// Throws ConfigError (with line numbers) on syntax errors, unknown sections
/// or keys, bad values, and a missing [kernel] block.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical text with every default resolved.
std::string to_text(const RunConfig& cfg);
nlohmann::json to_json(const RunConfig& cfg);

/// Kernel described by the config. `lenient` admits g0 >= 1 exponentials so
/// that violations can be reported instead of rejected.
Kernel build_kernel(const RunConfig& cfg, bool lenient = false);

}  // namespace memwave
