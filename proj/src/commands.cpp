#include "memwave/commands.hpp"

#include <cmath>
#include <iomanip>
#include <iostream>

#include <Eigen/Eigenvalues>

#include "memwave/discretization.hpp"
#include "memwave/energy.hpp"
#include "memwave/presets.hpp"
#include "memwave/report.hpp"
#include "memwave/resolvent.hpp"
#include "memwave/simulation.hpp"
#include "memwave/spectral.hpp"

namespace memwave {

namespace {

using nlohmann::json;

std::ostream& out_of(const CommandOptions& o) { return o.out ? *o.out : std::cout; }
std::ostream& err_of(const CommandOptions& o) { return o.err ? *o.err : std::cerr; }

std::filesystem::path output_dir(const RunConfig& cfg, const CommandOptions& opt) {
  std::filesystem::path dir = opt.out_dir ? *opt.out_dir : std::filesystem::path(cfg.output_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::vector<double> assumption_grid(const Kernel& k) {
  if (k.family() == KernelFamily::sampled) {
    const auto s = k.sample_points();
    return {s.begin(), s.end()};
  }
  const double last = k.is_zero() ? 10.0 : std::max(10.0, truncation_horizon(k, 1e-8));
  return uniform_grid(last, last / 2000.0);
}

json report_json(const AssumptionReport& rep) {
  return {{"pass", rep.pass},
          {"g0", rep.total_mass},
          {"ell", rep.residual},
          {"min_ratio", rep.min_ratio},
          {"min_ratio_at", rep.min_ratio_at},
          {"max_ratio", rep.max_ratio},
          {"max_ratio_at", rep.max_ratio_at},
          {"diagnostics", rep.diagnostics}};
}

/// Kernel plus its assumption report; prints diagnostics for failing kernels.
struct CheckedKernel {
  Kernel kernel;
  AssumptionReport report;
};

CheckedKernel checked_kernel(const RunConfig& cfg, const CommandOptions& opt) {
  Kernel k = build_kernel(cfg, true);
  AssumptionReport rep = verify_assumptions(k, assumption_grid(k));
  if (!rep.pass) {
    for (const auto& d : rep.diagnostics) {
      err_of(opt) << (opt.allow_violating_kernel ? "warning: " : "error: ") << d << '\n';
    }
  }
  return {std::move(k), std::move(rep)};
}

InitialData initial_data(const RunConfig& cfg, const Mesh& mesh) {
  std::string preset = cfg.initial_condition;
  if (preset.starts_with("file:")) {
    std::filesystem::path p = preset.substr(5);
    if (p.is_relative() && !cfg.base_dir.empty()) p = cfg.base_dir / p;
    preset = "file:" + p.string();
  }
  return make_initial_data(preset, mesh, cfg.seed);
}

long step_count(const RunConfig& cfg, double dt) {
  return std::max(1L, std::lround(cfg.t_final / dt));
}

void dump(const std::filesystem::path& dir, const DiscreteOperators& ops,
          const DafermosModel* model) {
  write_matrix_market(ops.K, dir / "K.mtx");
  write_matrix_market(ops.M, dir / "M.mtx");
  write_matrix_market(ops.M_total, dir / "M_total.mtx");
  if (model) {
    write_matrix_market(model->generator().E, dir / "E.mtx");
    write_matrix_market(model->generator().J, dir / "J.mtx");
    write_matrix_market(model->gram(), dir / "gram.mtx");
  }
}

struct RunOutcome {
  std::vector<EnergyRecord> records;
  bool monotone = true;
  double max_residual = 0.0;
};

RunOutcome run(Simulation& sim, long steps) {
  EnergyMonitor mon;
  mon.push(sim.time(), sim.energy());
  for (long i = 0; i < steps; ++i) {
    sim.step();
    mon.push(sim.time(), sim.energy());
  }
  return {mon.records(), mon.monotone(1e-10), mon.max_abs_residual()};
}

json fit_json(std::span<const EnergyRecord> records, double skip) {
  if (records.empty()) return nullptr;
  const double t0 = records.front().t, t1 = records.back().t;
  try {
    const DecayFit f = fit_decay(records, {t0 + skip * (t1 - t0), t1});
    return {{"gamma", f.gamma},
            {"gamma_ci", {f.gamma_low, f.gamma_high}},
            {"C", f.C},
            {"r2", f.r2},
            {"samples", f.samples},
            {"verdict", f.conclusive ? "conclusive" : "inconclusive"}};
  } catch (const Error& e) {
    return {{"gamma", nullptr}, {"verdict", "inconclusive"}, {"reason", e.what()}};
  }
}

/// Largest generalized eigenvalue frequency sqrt(mu_max) of (K, M_total).
double max_frequency(const DiscreteOperators& ops) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(Matrix(ops.K), Matrix(ops.M_total),
                                                      Eigen::EigenvaluesOnly);
  return std::sqrt(es.eigenvalues().maxCoeff());
}

}  // namespace

int cmd_verify_kernel(const RunConfig& cfg, const CommandOptions& opt) {
  const auto [kernel, rep] = checked_kernel(cfg, {opt.out_dir, false, true, opt.out, opt.err});
  auto& out = out_of(opt);
  out << std::setprecision(10);
  out << "kernel: " << kernel.describe() << '\n';
  out << "ℓ=" << rep.residual << '\n';
  out << "g0=" << rep.total_mass << '\n';
  out << "ratio -g'/g in [" << rep.min_ratio << " (s=" << rep.min_ratio_at << "), " << rep.max_ratio
      << " (s=" << rep.max_ratio_at << ")]\n";
  out << (rep.pass ? "PASS" : "FAIL") << '\n';
  json j = report_json(rep);
  j["kernel"] = kernel.describe();
  j["config"] = to_json(cfg);
  write_json(output_dir(cfg, opt) / "kernel_report.json", j);
  return rep.pass ? kExitOk : kExitPhysics;
}

int cmd_simulate(const RunConfig& cfg, const CommandOptions& opt) {
  const auto [kernel, rep] = checked_kernel(cfg, opt);
  if (!rep.pass && !opt.allow_violating_kernel) return kExitPhysics;
  const auto ops = assemble(build_mesh(cfg.n_cells));
  const auto grid = make_history_grid(kernel, cfg.history_options());
  const double dt = cfg.resolved_dt();
  const auto init = initial_data(cfg, ops.mesh);
  const auto past = make_past_history(cfg.past_history);
  const auto dir = output_dir(cfg, opt);

  auto sim = make_simulation(cfg.formulation, ops, kernel, grid, dt, init, past);
  if (opt.dump_operators) {
    if (cfg.formulation == "dafermos") {
      const DafermosModel model(ops, kernel, grid);
      dump(dir, ops, &model);
    } else {
      dump(dir, ops, nullptr);
    }
  }
  const RunOutcome res = run(*sim, step_count(cfg, dt));
  const std::string provenance = to_text(cfg);
  write_energy_csv(dir / "energy.csv", res.records, provenance);

  const double e0 = res.records.front().e_hilbert;
  const double e1 = res.records.back().e_hilbert;
  json summary = {
      {"formulation", cfg.formulation},
      {"steps", res.records.size() - 1},
      {"dt", dt},
      {"E_initial", e0},
      {"E_final", e1},
      {"E_final/E_initial", e0 > 0.0 ? json(e1 / e0) : json(nullptr)},
      {"monotone", res.monotone},
      {"max_abs_residual", res.max_residual},
      {"fit", fit_json(res.records, cfg.fit_skip)},
      {"config", to_json(cfg)},
  };
  summary["gamma_fit"] = summary["fit"]["gamma"];
  write_json(dir / "summary.json", summary);

  auto& out = out_of(opt);
  out << std::setprecision(10);
  out << "formulation=" << cfg.formulation << " steps=" << res.records.size() - 1 << " dt=" << dt
      << '\n';
  out << "E_final/E_initial=" << summary["E_final/E_initial"].dump() << '\n';
  out << "gamma_fit=" << summary["gamma_fit"].dump() << '\n';
  out << "monotone=" << (res.monotone ? "true" : "false") << '\n';
  if (!res.monotone) {
    err_of(opt) << "error: E_hilbert increased during the run (dissipativity violated)\n";
    return kExitPhysics;
  }
  return kExitOk;
}

int cmd_spectrum(const RunConfig& cfg, const CommandOptions& opt) {
  const auto [kernel, rep] = checked_kernel(cfg, opt);
  if (!rep.pass && !opt.allow_violating_kernel) return kExitPhysics;
  const auto ops = assemble(build_mesh(cfg.n_cells));
  const auto grid = make_history_grid(kernel, cfg.history_options());
  const DafermosModel model(ops, kernel, grid);
  const auto dir = output_dir(cfg, opt);
  if (opt.dump_operators) dump(dir, ops, &model);

  ArnoldiOptions aopt;
  aopt.beta_max = cfg.beta_max ? *cfg.beta_max : 1.2 * max_frequency(ops);
  const EigenReport eig = spectrum(model.generator(), cfg.dense_limit, aopt);

  SweepOptions sopt;
  sopt.points = cfg.sweep_points;
  sopt.beta_max = cfg.beta_max ? *cfg.beta_max : 5.0 * std::max(eig.max_imag, 0.2);
  sopt.threads = cfg.threads;
  // with ell <= 0 the H norm is indefinite; the eigenvalues already decide
  SweepResult sweep;
  if (eig.verdict == Verdict::unstable || model.ell() <= 0.0) {
    sweep.finite = false;
    sweep.method = "skipped";
  } else {
    sweep = resolvent_sweep(model, sopt);
  }

  // decay rate from a history-formulation run with the configured time settings
  const double dt = cfg.resolved_dt();
  auto sim = make_simulation("dafermos", ops, kernel, grid, dt, initial_data(cfg, ops.mesh),
                             make_past_history(cfg.past_history));
  const RunOutcome res = run(*sim, step_count(cfg, dt));
  const json fit = fit_json(res.records, cfg.fit_skip);

  Verdict verdict = eig.verdict;
  if (verdict == Verdict::stable && !sweep.finite) verdict = Verdict::inconclusive;

  json eigs = json::array();
  for (const auto& z : eig.eigenvalues) eigs.push_back({z.real(), z.imag()});
  json report = {
      {"eigenvalues", eigs},
      {"eigen_method", eig.method},
      {"eigen_converged", eig.converged},
      {"partial_spectrum", eig.partial},
      {"abscissa", eig.abscissa},
      {"axis_margin", eig.axis_margin},
      {"max_imag", eig.max_imag},
      {"beta", sweep.beta},
      {"r", sweep.norm},
      {"sweep_method", sweep.method},
      {"sup_resolvent", sweep.sup},
      {"argmax_beta", sweep.argmax},
      {"resolvent_finite", sweep.finite},
      {"gamma_fit", fit.is_object() ? fit["gamma"] : json(nullptr)},
      {"fit", fit},
      {"verdict", to_string(verdict)},
      {"config", to_json(cfg)},
  };
  write_json(dir / "spectrum.json", report);

  auto& out = out_of(opt);
  out << std::setprecision(10);
  out << "dimension=" << model.dimension() << " eigenvalues=" << eig.eigenvalues.size() << " ("
      << eig.method << ")\n";
  out << "abscissa=" << eig.abscissa << '\n';
  out << "sup_resolvent=" << sweep.sup << " at beta=" << sweep.argmax << '\n';
  out << "gamma_fit=" << report["gamma_fit"].dump() << '\n';
  out << "verdict=" << to_string(verdict) << '\n';
  switch (verdict) {
    case Verdict::stable:
      return kExitOk;
    case Verdict::unstable:
      return kExitUnstable;
    case Verdict::inconclusive:
      return kExitInconclusive;
  }
  return kExitInconclusive;
}

int cmd_triad(const RunConfig& cfg, const CommandOptions& opt) {
  const double dt = cfg.resolved_dt();
  const auto same = [&](const std::optional<double>& leg) {
    return !leg || std::abs(*leg - dt) <= 1e-15 * dt;
  };
  if (!same(cfg.dt_convolution) || !same(cfg.dt_prony)) {
    throw ConfigError("triad legs must share dt (time.dt = " + format_number(dt) + ")");
  }
  const auto [kernel, rep] = checked_kernel(cfg, opt);
  if (!rep.pass && !opt.allow_violating_kernel) return kExitPhysics;
  const auto ops = assemble(build_mesh(cfg.n_cells));
  const auto grid = make_history_grid(kernel, cfg.history_options());
  const auto init = initial_data(cfg, ops.mesh);
  const auto past = make_past_history(cfg.past_history);

  const bool prony = kernel.family() == KernelFamily::exponential;
  if (!prony) {
    err_of(opt) << "warning: Prony leg needs an exponential kernel; comparing dafermos and "
                   "convolution only\n";
  }
  auto daf = make_simulation("dafermos", ops, kernel, grid, dt, init, past);
  auto conv = make_simulation("convolution", ops, kernel, grid, dt, init, past);
  std::unique_ptr<Simulation> pr;
  if (prony) pr = make_simulation("prony", ops, kernel, grid, dt, init, past);

  const auto l2 = [&](const Vector& e) { return std::sqrt(std::max(0.0, e.dot(ops.M * e))); };
  double dc = 0.0, dp = 0.0, pc = 0.0;
  const auto compare = [&] {
    const Vector ud = daf->displacement(), uc = conv->displacement();
    dc = std::max(dc, l2(ud - uc));
    if (pr) {
      const Vector up = pr->displacement();
      dp = std::max(dp, l2(ud - up));
      pc = std::max(pc, l2(up - uc));
    }
  };
  compare();
  const long steps = step_count(cfg, dt);
  for (long i = 0; i < steps; ++i) {
    daf->step();
    conv->step();
    if (pr) pr->step();
    compare();
  }

  bool pass = dc <= cfg.triad_tolerance;
  json j = {{"dt", dt},
            {"steps", steps},
            {"t_final", daf->time()},
            {"dafermos_vs_convolution", dc},
            {"tolerance", cfg.triad_tolerance},
            {"legs", prony ? json::array({"dafermos", "convolution", "prony"})
                           : json::array({"dafermos", "convolution"})}};
  if (prony) {
    pass = pass && dp <= cfg.triad_tolerance && pc <= cfg.prony_tolerance;
    j["dafermos_vs_prony"] = dp;
    j["prony_vs_convolution"] = pc;
    j["prony_tolerance"] = cfg.prony_tolerance;
  } else {
    j["warning"] = "non-exponential kernel: Prony leg skipped";
  }
  j["pass"] = pass;
  j["config"] = to_json(cfg);
  write_json(output_dir(cfg, opt) / "triad.json", j);

  auto& out = out_of(opt);
  out << std::setprecision(6) << std::scientific;
  out << "max L2 |u_dafermos - u_convolution| = " << dc << '\n';
  if (prony) {
    out << "max L2 |u_dafermos - u_prony|       = " << dp << '\n';
    out << "max L2 |u_prony - u_convolution|    = " << pc << '\n';
  }
  out << std::defaultfloat << (pass ? "PASS" : "FAIL") << '\n';
  return pass ? kExitOk : kExitPhysics;
}

int run_command(const std::string& command, const std::filesystem::path& config_path,
                const CommandOptions& opt) {
  try {
    const RunConfig cfg = load_config(config_path);
    if (command == "verify-kernel") return cmd_verify_kernel(cfg, opt);
    if (command == "simulate") return cmd_simulate(cfg, opt);
    if (command == "spectrum") return cmd_spectrum(cfg, opt);
    if (command == "triad") return cmd_triad(cfg, opt);
    throw ConfigError("unknown command '" + command + "'");
  } catch (const ConfigError& e) {
    err_of(opt) << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const KernelError& e) {
    err_of(opt) << "kernel error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace memwave
