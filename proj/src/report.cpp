#include "memwave/report.hpp"

#include <fstream>
#include <sstream>

namespace memwave {

std::string format_number(double x) {
  std::ostringstream os;
  os << std::scientific;
  os.precision(16);  // 17 significant digits
  os << x;
  return os.str();
}

void write_energy_csv(const std::filesystem::path& path, std::span<const EnergyRecord> records,
                      const std::string& provenance) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  std::istringstream lines(provenance);
  for (std::string line; std::getline(lines, line);) out << "# " << line << '\n';
  out << "t,E_paper,E_hilbert,dissipation,residual\n";
  for (const auto& r : records) {
    out << format_number(r.t) << ',' << format_number(r.e_paper) << ','
        << format_number(r.e_hilbert) << ',' << format_number(r.dissipation) << ','
        << format_number(r.residual) << '\n';
  }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace memwave
