#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "memwave/commands.hpp"

using namespace memwave;
namespace fs = std::filesystem;

namespace {

const fs::path kData = MEMWAVE_TEST_DATA;

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("memwave_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(const std::string& command, const std::string& config, const fs::path& dir,
            bool allow = false, bool dump = false) {
  std::ostringstream out, err;
  CommandOptions opt;
  opt.out_dir = dir;
  opt.out = &out;
  opt.err = &err;
  opt.allow_violating_kernel = allow;
  opt.dump_operators = dump;
  const int code = run_command(command, kData / config, opt);
  return {code, out.str(), err.str()};
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int binary(const std::string& args) {
  const int status = std::system((std::string(MEMWAVE_CLI) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("verify-kernel") {
  const auto dir = scratch("verify");
  auto r = run("verify-kernel", "viscoelastic.toml", dir);
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("ℓ=0.5") != std::string::npos);
  CHECK(r.out.find("PASS") != std::string::npos);
  CHECK(read_json(dir / "kernel_report.json")["pass"] == true);

  r = run("verify-kernel", "violating.toml", dir);
  CHECK(r.code == kExitPhysics);
  CHECK(r.out.find("FAIL") != std::string::npos);

  r = run("verify-kernel", "polynomial.toml", dir);
  CHECK(r.code == kExitPhysics);
  const auto rep = read_json(dir / "kernel_report.json");
  CHECK(rep["pass"] == false);
  CHECK(rep["diagnostics"][0].get<std::string>().find("lower bound") != std::string::npos);

  CHECK(run("verify-kernel", "elastic.toml", dir).code == kExitOk);
  r = run("verify-kernel", "no_kernel.toml", dir);
  CHECK(r.code == kExitConfig);
  CHECK(r.err.find("missing [kernel] block") != std::string::npos);
}

TEST_CASE("simulate") {
  const auto dir = scratch("simulate");
  auto r = run("simulate", "viscoelastic.toml", dir, false, true);
  REQUIRE(r.code == kExitOk);
  const auto s = read_json(dir / "summary.json");
  CHECK(s["monotone"] == true);
  CHECK(s["gamma_fit"].get<double>() > 0.0);
  CHECK(s["config"]["kernel"]["a"] == 0.5);
  CHECK(fs::exists(dir / "K.mtx"));
  CHECK(fs::exists(dir / "J.mtx"));
  const std::string csv = slurp(dir / "energy.csv");
  CHECK(csv.rfind("# ", 0) == 0);
  CHECK(csv.find("t,E_paper,E_hilbert,dissipation,residual") != std::string::npos);

  r = run("simulate", "elastic.toml", dir);
  CHECK(r.code == kExitOk);
  const auto e = read_json(dir / "summary.json");
  CHECK(e["monotone"] == true);
  CHECK(e["E_final/E_initial"].get<double>() == doctest::Approx(1.0).epsilon(1e-10));

  CHECK(run("simulate", "violating.toml", dir).code == kExitPhysics);
}

TEST_CASE("simulate is deterministic") {
  const auto a = scratch("det_a"), b = scratch("det_b");
  REQUIRE(run("simulate", "viscoelastic.toml", a).code == kExitOk);
  REQUIRE(run("simulate", "viscoelastic.toml", b).code == kExitOk);
  CHECK(slurp(a / "energy.csv") == slurp(b / "energy.csv"));
  CHECK(slurp(a / "summary.json") == slurp(b / "summary.json"));
}

TEST_CASE("spectrum") {
  const auto dir = scratch("spectrum");
  auto r = run("spectrum", "viscoelastic.toml", dir);
  CHECK(r.code == kExitOk);
  auto j = read_json(dir / "spectrum.json");
  CHECK(j["verdict"] == "stable");
  CHECK(j["abscissa"].get<double>() < 0.0);
  CHECK(j["resolvent_finite"] == true);
  CHECK(j["beta"].size() == j["r"].size());

  CHECK(run("spectrum", "elastic.toml", dir).code == kExitInconclusive);
  CHECK(read_json(dir / "spectrum.json")["verdict"] == "inconclusive");
  CHECK(run("spectrum", "violating.toml", dir, true).code == kExitUnstable);
  CHECK(run("spectrum", "empty_sweep.toml", dir).code == kExitConfig);
}

TEST_CASE("triad") {
  const auto dir = scratch("triad");
  auto r = run("triad", "triad.toml", dir);
  CHECK(r.code == kExitOk);
  const auto j = read_json(dir / "triad.json");
  CHECK(j["pass"] == true);
  CHECK(run("triad", "triad_mismatch.toml", dir).code == kExitConfig);
  r = run("triad", "polynomial.toml", dir, true);
  CHECK(r.err.find("Prony") != std::string::npos);
}

TEST_CASE("binary exit codes") {
  const auto dir = scratch("binary");
  const std::string out = " --out " + dir.string();
  CHECK(binary("--config " + (kData / "viscoelastic.toml").string() + out + " verify-kernel") == 0);
  CHECK(binary("--config " + (kData / "violating.toml").string() + out + " verify-kernel") == 2);
  CHECK(binary("--config " + (kData / "no_kernel.toml").string() + out + " verify-kernel") == 1);
  CHECK(binary("--config " + (kData / "violating.toml").string() + out +
               " --allow-violating-kernel spectrum") == 3);
  CHECK(binary("--config " + (kData / "elastic.toml").string() + out + " spectrum") == 4);
  CHECK(binary("--config /nonexistent.toml verify-kernel") == 1);
  CHECK(binary("--config " + (kData / "viscoelastic.toml").string() + " bogus") == 1);
  CHECK(binary("--help") == 0);
}
