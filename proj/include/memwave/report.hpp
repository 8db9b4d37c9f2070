#pragma once

#include <filesystem>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "memwave/energy.hpp"

namespace memwave {

/// Energy CSV: "# "-prefixed provenance lines (the resolved config), a header
/// row t,E_paper,E_hilbert,dissipation,residual, then one row per record in
/// 17-digit scientific notation.
void write_energy_csv(const std::filesystem::path& path, std::span<const EnergyRecord> records,
                      const std::string& provenance);

/// Pretty-printed JSON with a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// Number formatted as in the CSV output.
std::string format_number(double x);

}  // namespace memwave
