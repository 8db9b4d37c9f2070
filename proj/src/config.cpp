#include "memwave/config.hpp"

#include "memwave/presets.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace memwave {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  int line = 0;
};

std::string unquote(const std::string& v, int line) {
  if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'')) {
    if (v.back() != v.front()) throw ConfigError("line " + std::to_string(line) + ": unterminated string");
    return v.substr(1, v.size() - 2);
  }
  return v;
}

double to_double(const Entry& e, const std::string& key) {
  double x = 0.0;
  const auto* first = e.value.data();
  const auto* last = first + e.value.size();
  const auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc() || ptr != last || !std::isfinite(x)) {
    throw ConfigError("line " + std::to_string(e.line) + ": " + key + " expects a number, got '" +
                      e.value + "'");
  }
  return x;
}

double positive(const Entry& e, const std::string& key) {
  const double x = to_double(e, key);
  if (!(x > 0.0)) throw ConfigError("line " + std::to_string(e.line) + ": " + key + " must be positive");
  return x;
}

long to_integer(const Entry& e, const std::string& key) {
  long x = 0;
  const auto* first = e.value.data();
  const auto* last = first + e.value.size();
  const auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError("line " + std::to_string(e.line) + ": " + key + " expects an integer, got '" +
                      e.value + "'");
  }
  return x;
}

std::optional<double> auto_or_positive(const Entry& e, const std::string& key) {
  if (e.value == "auto") return std::nullopt;
  return positive(e, key);
}

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"kernel", {"type", "a", "b", "file", "zeta0", "zeta1"}},
      {"mesh", {"n_cells"}},
      {"history", {"s_max", "s_nodes", "past_history", "grading", "stagger"}},
      {"time", {"formulation", "dt", "t_final", "initial_condition", "seed"}},
      {"analysis", {"beta_max", "sweep_points", "fit_skip", "dense_limit", "threads"}},
      {"triad", {"dt_convolution", "dt_prony", "tolerance", "prony_tolerance"}},
      {"output", {"dir"}},
  };
  return s;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

HistoryOptions RunConfig::history_options() const {
  HistoryOptions o;
  o.s_max = s_max;
  o.nodes = s_nodes;
  o.grading = grading;
  o.stagger = stagger;
  return o;
}

RunConfig parse_config(const std::string& text) {
  std::map<std::string, std::map<std::string, Entry>> data;
  std::istringstream in(text);
  std::string raw, section;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    // strip comments outside quotes
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!schema().contains(section)) throw ConfigError(where + "unknown section [" + section + "]");
      if (data.contains(section)) throw ConfigError(where + "duplicate section [" + section + "]");
      data[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    if (section.empty()) throw ConfigError(where + "key outside of any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = unquote(trim(line.substr(eq + 1)), lineno);
    if (!schema().at(section).contains(key)) {
      throw ConfigError(where + "unknown key '" + key + "' in [" + section + "]");
    }
    if (data[section].contains(key)) throw ConfigError(where + "duplicate key '" + key + "'");
    if (value.empty()) throw ConfigError(where + "empty value for '" + key + "'");
    data[section][key] = {value, lineno};
  }

  if (!data.contains("kernel") || !data["kernel"].contains("type")) {
    throw ConfigError("missing [kernel] block with a type");
  }

  RunConfig cfg;
  const auto each = [&](const std::string& sec,
                        const std::function<void(const std::string&, const Entry&)>& f) {
    if (!data.contains(sec)) return;
    for (const auto& [k, e] : data[sec]) f(k, e);
  };

  auto& kern = data["kernel"];
  cfg.kernel.type = kern["type"].value;
  const auto need = [&](const std::string& key) -> const Entry& {
    if (!kern.contains(key)) {
      throw ConfigError("kernel type '" + cfg.kernel.type + "' needs '" + key + "'");
    }
    return kern[key];
  };
  const auto forbid_others = [&](std::set<std::string> allowed) {
    allowed.insert("type");
    for (const auto& [k, e] : kern) {
      if (!allowed.contains(k)) {
        throw ConfigError("line " + std::to_string(e.line) + ": '" + k +
                          "' does not apply to kernel type '" + cfg.kernel.type + "'");
      }
    }
  };
  if (cfg.kernel.type == "exponential") {
    forbid_others({"a", "b"});
    cfg.kernel.a = to_double(need("a"), "a");
    cfg.kernel.b = to_double(need("b"), "b");
  } else if (cfg.kernel.type == "sampled") {
    forbid_others({"file", "zeta0", "zeta1"});
    cfg.kernel.file = need("file").value;
    cfg.kernel.zeta0 = positive(need("zeta0"), "zeta0");
    cfg.kernel.zeta1 = positive(need("zeta1"), "zeta1");
  } else if (cfg.kernel.type == "zero") {
    forbid_others({});
  } else {
    throw ConfigError("line " + std::to_string(kern["type"].line) + ": unknown kernel type '" +
                      cfg.kernel.type + "'");
  }

  each("mesh", [&](const std::string&, const Entry& e) {
    const long n = to_integer(e, "n_cells");
    if (n < 2) throw ConfigError("line " + std::to_string(e.line) + ": n_cells must be >= 2");
    cfg.n_cells = static_cast<int>(n);
  });
  each("history", [&](const std::string& k, const Entry& e) {
    if (k == "s_max") cfg.s_max = auto_or_positive(e, k);
    if (k == "s_nodes") {
      const long n = to_integer(e, k);
      if (n < 1) throw ConfigError("line " + std::to_string(e.line) + ": s_nodes must be >= 1");
      cfg.s_nodes = static_cast<int>(n);
    }
    if (k == "past_history") {
      make_past_history(e.value);  // validates the preset name
      cfg.past_history = e.value;
    }
    if (k == "grading") cfg.grading = positive(e, k);
    if (k == "stagger") cfg.stagger = to_double(e, k);
  });
  each("time", [&](const std::string& k, const Entry& e) {
    if (k == "formulation") {
      if (e.value != "dafermos" && e.value != "convolution" && e.value != "prony") {
        throw ConfigError("line " + std::to_string(e.line) + ": unknown formulation '" + e.value + "'");
      }
      cfg.formulation = e.value;
    }
    if (k == "dt") cfg.dt = auto_or_positive(e, k);
    if (k == "t_final") cfg.t_final = positive(e, k);
    if (k == "initial_condition") {
      static const std::set<std::string> known = {"sine", "gaussian", "zero", "random"};
      if (!known.contains(e.value) && !e.value.starts_with("file:")) {
        throw ConfigError("line " + std::to_string(e.line) + ": unknown initial_condition '" +
                          e.value + "'");
      }
      cfg.initial_condition = e.value;
    }
    if (k == "seed") {
      const long s = to_integer(e, k);
      if (s < 0) throw ConfigError("line " + std::to_string(e.line) + ": seed must be >= 0");
      cfg.seed = static_cast<std::uint64_t>(s);
    }
  });
  each("analysis", [&](const std::string& k, const Entry& e) {
    if (k == "beta_max") cfg.beta_max = auto_or_positive(e, k);
    if (k == "sweep_points") {
      const long n = to_integer(e, k);
      if (n < 1) throw ConfigError("line " + std::to_string(e.line) + ": sweep grid is empty");
      cfg.sweep_points = static_cast<int>(n);
    }
    if (k == "fit_skip") {
      cfg.fit_skip = to_double(e, k);
      if (cfg.fit_skip < 0.0 || cfg.fit_skip >= 1.0) {
        throw ConfigError("line " + std::to_string(e.line) + ": fit_skip must lie in [0, 1)");
      }
    }
    if (k == "dense_limit") cfg.dense_limit = static_cast<int>(to_integer(e, k));
    if (k == "threads") {
      const long t = to_integer(e, k);
      if (t < 1) throw ConfigError("line " + std::to_string(e.line) + ": threads must be >= 1");
      cfg.threads = static_cast<unsigned>(t);
    }
  });
  each("triad", [&](const std::string& k, const Entry& e) {
    if (k == "dt_convolution") cfg.dt_convolution = positive(e, k);
    if (k == "dt_prony") cfg.dt_prony = positive(e, k);
    if (k == "tolerance") cfg.triad_tolerance = positive(e, k);
    if (k == "prony_tolerance") cfg.prony_tolerance = positive(e, k);
  });
  each("output", [&](const std::string&, const Entry& e) { cfg.output_dir = e.value; });
  if (cfg.stagger < 0.0 || cfg.stagger > 1.0) throw ConfigError("stagger must lie in [0, 1]");
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig cfg = parse_config(ss.str());
  cfg.base_dir = path.parent_path();
  return cfg;
}

std::string to_text(const RunConfig& cfg) {
  std::ostringstream os;
  os << "[kernel]\ntype = \"" << cfg.kernel.type << "\"\n";
  if (cfg.kernel.type == "exponential") {
    os << "a = " << fmt(cfg.kernel.a) << "\nb = " << fmt(cfg.kernel.b) << "\n";
  } else if (cfg.kernel.type == "sampled") {
    os << "file = \"" << cfg.kernel.file << "\"\nzeta0 = " << fmt(cfg.kernel.zeta0)
       << "\nzeta1 = " << fmt(cfg.kernel.zeta1) << "\n";
  }
  os << "\n[mesh]\nn_cells = " << cfg.n_cells << "\n";
  os << "\n[history]\ns_max = " << (cfg.s_max ? fmt(*cfg.s_max) : "\"auto\"")
     << "\ns_nodes = " << cfg.s_nodes << "\npast_history = \"" << cfg.past_history
     << "\"\ngrading = " << fmt(cfg.grading) << "\nstagger = " << fmt(cfg.stagger) << "\n";
  os << "\n[time]\nformulation = \"" << cfg.formulation << "\"\ndt = " << fmt(cfg.resolved_dt())
     << "\nt_final = " << fmt(cfg.t_final) << "\ninitial_condition = \"" << cfg.initial_condition
     << "\"\nseed = " << cfg.seed << "\n";
  os << "\n[analysis]\nbeta_max = " << (cfg.beta_max ? fmt(*cfg.beta_max) : "\"auto\"")
     << "\nsweep_points = " << cfg.sweep_points << "\nfit_skip = " << fmt(cfg.fit_skip)
     << "\ndense_limit = " << cfg.dense_limit << "\nthreads = " << cfg.threads << "\n";
  os << "\n[triad]\n";
  if (cfg.dt_convolution) os << "dt_convolution = " << fmt(*cfg.dt_convolution) << "\n";
  if (cfg.dt_prony) os << "dt_prony = " << fmt(*cfg.dt_prony) << "\n";
  os << "tolerance = " << fmt(cfg.triad_tolerance) << "\nprony_tolerance = "
     << fmt(cfg.prony_tolerance) << "\n";
  os << "\n[output]\ndir = \"" << cfg.output_dir << "\"\n";
  return os.str();
}

nlohmann::json to_json(const RunConfig& cfg) {
  using nlohmann::json;
  json kernel = {{"type", cfg.kernel.type}};
  if (cfg.kernel.type == "exponential") {
    kernel["a"] = cfg.kernel.a;
    kernel["b"] = cfg.kernel.b;
  } else if (cfg.kernel.type == "sampled") {
    kernel["file"] = cfg.kernel.file;
    kernel["zeta0"] = cfg.kernel.zeta0;
    kernel["zeta1"] = cfg.kernel.zeta1;
  }
  json triad = {{"tolerance", cfg.triad_tolerance}, {"prony_tolerance", cfg.prony_tolerance}};
  if (cfg.dt_convolution) triad["dt_convolution"] = *cfg.dt_convolution;
  if (cfg.dt_prony) triad["dt_prony"] = *cfg.dt_prony;
  return {
      {"kernel", kernel},
      {"mesh", {{"n_cells", cfg.n_cells}}},
      {"history",
       {{"s_max", cfg.s_max ? json(*cfg.s_max) : json("auto")},
        {"s_nodes", cfg.s_nodes},
        {"past_history", cfg.past_history},
        {"grading", cfg.grading},
        {"stagger", cfg.stagger}}},
      {"time",
       {{"formulation", cfg.formulation},
        {"dt", cfg.resolved_dt()},
        {"t_final", cfg.t_final},
        {"initial_condition", cfg.initial_condition},
        {"seed", cfg.seed}}},
      {"analysis",
       {{"beta_max", cfg.beta_max ? json(*cfg.beta_max) : json("auto")},
        {"sweep_points", cfg.sweep_points},
        {"fit_skip", cfg.fit_skip},
        {"dense_limit", cfg.dense_limit},
        {"threads", cfg.threads}}},
      {"triad", triad},
      {"output", {{"dir", cfg.output_dir}}},
  };
}

Kernel build_kernel(const RunConfig& cfg, bool lenient) {
  const auto& k = cfg.kernel;
  if (k.type == "zero") return Kernel::zero();
  if (k.type == "exponential") {
    return Kernel::exponential(k.a, k.b, lenient ? Admissibility::lenient : Admissibility::enforce);
  }
  std::filesystem::path file = k.file;
  if (file.is_relative() && !cfg.base_dir.empty()) file = cfg.base_dir / file;
  return Kernel::from_csv(file, {k.zeta0, k.zeta1});
}

}  // namespace memwave
