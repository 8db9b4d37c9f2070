#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "memwave/config.hpp"

namespace memwave {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitPhysics = 2,
  kExitUnstable = 3,
  kExitInconclusive = 4,
};

struct CommandOptions {
  std::optional<std::filesystem::path> out_dir;  // overrides [output] dir
  bool dump_operators = false;
  bool allow_violating_kernel = false;
  std::ostream* out = nullptr;  // summaries; std::cout when null
  std::ostream* err = nullptr;  // diagnostics; std::cerr when null
};

/// Writes kernel_report.json; 0 on pass, 2 on an assumption failure.
int cmd_verify_kernel(const RunConfig& cfg, const CommandOptions& opt = {});
/// Writes energy.csv and summary.json; 2 if E_hilbert increases.
int cmd_simulate(const RunConfig& cfg, const CommandOptions& opt = {});
/// Writes spectrum.json; 0 stable, 3 unstable, 4 inconclusive.
int cmd_spectrum(const RunConfig& cfg, const CommandOptions& opt = {});
/// Writes triad.json; 0 when every leg agrees within tolerance, 2 otherwise.
int cmd_triad(const RunConfig& cfg, const CommandOptions& opt = {});

/// Loads the config, dispatches by name and maps exceptions to exit codes
/// (configuration and kernel construction errors give 1).
int run_command(const std::string& command, const std::filesystem::path& config_path,
                const CommandOptions& opt = {});

}  // namespace memwave
