#pragma once

#include <string>
#include <vector>

#include "bergerdeck/integrator.hpp"
#include "bergerdeck/model.hpp"

namespace bergerdeck {

/// A complete experiment description. Defaults are the fig7 preset.
///
/// Config documents are line oriented:
///
///   # comment
///   [grid]
///   J = 149
///
/// Sections and keys:
///   [run]      name, kind (dynamic | static), tail_fraction
///   [grid]     J, K, l
///   [physics]  sigma, P, S
///   [damping]  width, feedback (linear | sqrt | power:<e> | piecewise | expdeg)
///   [time]     dt, T, record_stride
///   [initial]  shape (static | sine), amplitude, mode
///   [output]   csv, svg, svg_scale (linear | logy), snapshots (comma list of times)
///
/// With shape = static, u0 solves Delta^2 u = amplitude sin(mode x); with
/// shape = sine, u0 = amplitude sin(mode x) on every level. The initial
/// velocity is zero.
struct RunConfig {
  std::string name = "fig7";
  std::string kind = "dynamic";
  double tail_fraction = 0.5;

  int J = 149;
  int K = 99;
  double l = 0.78539816339744828;

  double sigma = 0.2;
  double P = 1e-3;
  double S = 1e-5;

  int width = 5;
  FeedbackKind feedback = FeedbackKind::linear();

  double dt = 0.01;
  double T = 30.0;
  int record_stride = 10;

  std::string shape = "static";
  double amplitude = 50.0;
  int mode = 2;

  std::string csv = "fig7_energy.csv";
  std::string svg;
  std::string svg_scale = "linear";
  std::vector<double> snapshots;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

  /// Throws ValidationError naming the offending field.
  void validate() const;

  ModelConfig model() const;
};

/// Throws ParseError (with line number) for malformed lines, unknown sections
/// or keys and unparsable values; ValidationError for out-of-range values.
RunConfig parse_config(const std::string& text);

/// Canonical document; parse_config(render_config(c)) == c.
std::string render_config(const RunConfig& c);

/// fig6 (sqrt), fig7 (linear), fig8 (piecewise), static, undamped. Throws
/// ValidationError for any other name.
RunConfig preset(const std::string& name);
std::vector<std::string> preset_names();

/// Reads and parses a config file; IoError when it cannot be read.
RunConfig load_config(const std::string& path);

/// Grid, model and initial data for the integrator (solves the static problem
/// when shape = static).
RunSpec build_run_spec(const RunConfig& c);

/// amplitude sin(mode x) sampled on the unknowns.
std::vector<double> sine_load(const Grid& grid, double amplitude, int mode);

}  // namespace bergerdeck
