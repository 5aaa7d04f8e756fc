#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "bergerdeck/energy.hpp"

namespace bergerdeck {

/// Header step,t,E_total,E_kinetic,E_hstar,E_px,E_sx,dissipated_cum, then one
/// row per record with 17 significant digits and '\n' line ends.
void write_energy_csv(std::ostream& os, std::span<const EnergyRecord> records);
/// Throws IoError naming the path on failure.
void write_energy_csv(const std::string& path, std::span<const EnergyRecord> records);

/// Inverse of write_energy_csv. Throws ParseError with the line number.
std::vector<EnergyRecord> read_energy_csv(std::istream& is);
std::vector<EnergyRecord> read_energy_csv_file(const std::string& path);

enum class PlotScale { Linear, LogY };

/// Standalone SVG of E_total against t: axes with tick labels, a single
/// polyline and a title. With LogY, nonpositive energies are dropped and
/// reported as "dropped=N". Throws PlotError with fewer than 2 plottable
/// points.
std::string render_svg_plot(std::span<const EnergyRecord> records, PlotScale scale, const std::string& title);
void emit_svg_plot(std::span<const EnergyRecord> records, const std::string& path, PlotScale scale,
                   const std::string& title);

}  // namespace bergerdeck
