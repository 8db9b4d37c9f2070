#include <iostream>

#include <CLI11.hpp>

#include "memwave/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"memwave: viscoelastic wave equation with infinite memory and a dynamic boundary"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir;
  bool dump = false;
  bool allow = false;
  app.add_option("--config", config, "run configuration file")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (overrides [output] dir)");
  app.add_flag("--dump-operators", dump, "write K, M and generator matrices in MatrixMarket format");
  app.add_flag("--allow-violating-kernel", allow, "run even if the kernel fails the assumption check");
  app.fallthrough();

  app.add_subcommand("verify-kernel", "check the kernel assumptions");
  app.add_subcommand("simulate", "time-step the configured formulation and record energies");
  app.add_subcommand("spectrum", "eigenvalues, resolvent sweep and stability verdict");
  app.add_subcommand("triad", "compare the history, convolution and Prony formulations");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : memwave::kExitConfig;
  }

  memwave::CommandOptions opt;
  if (!out_dir.empty()) opt.out_dir = out_dir;
  opt.dump_operators = dump;
  opt.allow_violating_kernel = allow;
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return memwave::run_command(command, config, opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return memwave::kExitPhysics;
  }
}
