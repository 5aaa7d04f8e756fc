#include "bergerdeck/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "bergerdeck/errors.hpp"
#include "bergerdeck/staticsolve.hpp"

namespace bergerdeck {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& v, std::size_t line, const std::string& key) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || v.empty()) throw ParseError(line, "key '" + key + "': bad number '" + v + "'");
  return out;
}

int parse_int(const std::string& v, std::size_t line, const std::string& key) {
  int out = 0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || v.empty()) throw ParseError(line, "key '" + key + "': bad integer '" + v + "'");
  return out;
}

std::vector<double> parse_list(const std::string& v, std::size_t line, const std::string& key) {
  std::vector<double> out;
  if (trim(v).empty()) return out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(trim(item), line, key));
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, std::size_t)>;

const std::map<std::string, std::map<std::string, Setter>>& setters() {
  static const std::map<std::string, std::map<std::string, Setter>> table = {
      {"run",
       {{"name", [](RunConfig& c, const std::string& v, std::size_t) { c.name = v; }},
        {"kind", [](RunConfig& c, const std::string& v, std::size_t) { c.kind = v; }},
        {"tail_fraction",
         [](RunConfig& c, const std::string& v, std::size_t n) { c.tail_fraction = parse_double(v, n, "tail_fraction"); }}}},
      {"grid",
       {{"J", [](RunConfig& c, const std::string& v, std::size_t n) { c.J = parse_int(v, n, "J"); }},
        {"K", [](RunConfig& c, const std::string& v, std::size_t n) { c.K = parse_int(v, n, "K"); }},
        {"l", [](RunConfig& c, const std::string& v, std::size_t n) { c.l = parse_double(v, n, "l"); }}}},
      {"physics",
       {{"sigma", [](RunConfig& c, const std::string& v, std::size_t n) { c.sigma = parse_double(v, n, "sigma"); }},
        {"P", [](RunConfig& c, const std::string& v, std::size_t n) { c.P = parse_double(v, n, "P"); }},
        {"S", [](RunConfig& c, const std::string& v, std::size_t n) { c.S = parse_double(v, n, "S"); }}}},
      {"damping",
       {{"width", [](RunConfig& c, const std::string& v, std::size_t n) { c.width = parse_int(v, n, "width"); }},
        {"feedback",
         [](RunConfig& c, const std::string& v, std::size_t n) {
           try {
             c.feedback = FeedbackKind::parse(v);
           } catch (const ParameterError& e) {
             throw ParseError(n, e.what());
           }
         }}}},
      {"time",
       {{"dt", [](RunConfig& c, const std::string& v, std::size_t n) { c.dt = parse_double(v, n, "dt"); }},
        {"T", [](RunConfig& c, const std::string& v, std::size_t n) { c.T = parse_double(v, n, "T"); }},
        {"record_stride",
         [](RunConfig& c, const std::string& v, std::size_t n) { c.record_stride = parse_int(v, n, "record_stride"); }}}},
      {"initial",
       {{"shape", [](RunConfig& c, const std::string& v, std::size_t) { c.shape = v; }},
        {"amplitude",
         [](RunConfig& c, const std::string& v, std::size_t n) { c.amplitude = parse_double(v, n, "amplitude"); }},
        {"mode", [](RunConfig& c, const std::string& v, std::size_t n) { c.mode = parse_int(v, n, "mode"); }}}},
      {"output",
       {{"csv", [](RunConfig& c, const std::string& v, std::size_t) { c.csv = v; }},
        {"svg", [](RunConfig& c, const std::string& v, std::size_t) { c.svg = v; }},
        {"svg_scale", [](RunConfig& c, const std::string& v, std::size_t) { c.svg_scale = v; }},
        {"snapshots",
         [](RunConfig& c, const std::string& v, std::size_t n) { c.snapshots = parse_list(v, n, "snapshots"); }}}},
  };
  return table;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace

void RunConfig::validate() const {
  require(kind == "dynamic" || kind == "static", "run.kind must be dynamic or static");
  require(tail_fraction > 0.0 && tail_fraction <= 1.0, "run.tail_fraction must lie in (0, 1]");
  require(J >= 5, "grid.J must be >= 5");
  require((J + 1) % 2 == 0, "grid.J must be odd (Simpson weights need J+1 even)");
  require(K >= 3, "grid.K must be >= 3");
  require(std::isfinite(l) && l > 0.0, "grid.l must be finite and > 0");
  require(sigma > 0.0 && sigma < 0.5, "physics.sigma = " + std::to_string(sigma) + " outside the bound (0, 1/2)");
  require(std::isfinite(P), "physics.P must be finite");
  require(std::isfinite(S) && S >= 0.0, "physics.S must be finite and >= 0");
  require(width >= 0 && 2 * width < std::min(J, K + 2), "damping.width must satisfy 0 <= 2 width < min(J, K+2)");
  require(std::isfinite(dt) && dt > 0.0, "time.dt must be finite and > 0");
  require(std::isfinite(T) && T >= 0.0, "time.T must be finite and >= 0");
  require(record_stride >= 1, "time.record_stride must be >= 1");
  require(shape == "static" || shape == "sine", "initial.shape must be static or sine");
  require(std::isfinite(amplitude), "initial.amplitude must be finite");
  require(mode >= 1, "initial.mode must be >= 1");
  require(!csv.empty(), "output.csv must be a nonempty path");
  require(svg_scale == "linear" || svg_scale == "logy", "output.svg_scale must be linear or logy");
  for (double t : snapshots) require(std::isfinite(t) && t >= 0.0 && t <= T, "output.snapshots must lie in [0, T]");
}

ModelConfig RunConfig::model() const {
  ModelConfig m;
  m.sigma = sigma;
  m.P = P;
  m.S = S;
  m.feedback = feedback;
  m.damping_width = width;
  return m;
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    if (const auto hash = s.find('#'); hash != std::string::npos) s.erase(hash);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ParseError(line, "malformed section header '" + s + "'");
      section = trim(s.substr(1, s.size() - 2));
      if (!setters().count(section)) throw ParseError(line, "unknown section '" + section + "'");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError(line, "expected 'key = value', got '" + s + "'");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw ParseError(line, "missing key before '='");
    if (section.empty()) {
      // Bare keys are looked up in every section; they must be unambiguous.
      std::string found;
      for (const auto& [name, keys] : setters())
        if (keys.count(key)) found = name;
      if (found.empty()) throw ParseError(line, "unknown key '" + key + "'");
      setters().at(found).at(key)(c, value, line);
      continue;
    }
    const auto& keys = setters().at(section);
    const auto it = keys.find(key);
    if (it == keys.end()) throw ParseError(line, "unknown key '" + key + "' in section [" + section + "]");
    it->second(c, value, line);
  }
  c.validate();
  return c;
}

std::string render_config(const RunConfig& c) {
  std::ostringstream o;
  o << "[run]\nname = " << c.name << "\nkind = " << c.kind << "\ntail_fraction = " << fmt(c.tail_fraction) << "\n\n";
  o << "[grid]\nJ = " << c.J << "\nK = " << c.K << "\nl = " << fmt(c.l) << "\n\n";
  o << "[physics]\nsigma = " << fmt(c.sigma) << "\nP = " << fmt(c.P) << "\nS = " << fmt(c.S) << "\n\n";
  o << "[damping]\nwidth = " << c.width << "\nfeedback = " << c.feedback.name() << "\n\n";
  o << "[time]\ndt = " << fmt(c.dt) << "\nT = " << fmt(c.T) << "\nrecord_stride = " << c.record_stride << "\n\n";
  o << "[initial]\nshape = " << c.shape << "\namplitude = " << fmt(c.amplitude) << "\nmode = " << c.mode << "\n\n";
  o << "[output]\ncsv = " << c.csv << "\nsvg = " << c.svg << "\nsvg_scale = " << c.svg_scale << "\nsnapshots = ";
  for (std::size_t i = 0; i < c.snapshots.size(); ++i) o << (i ? ", " : "") << fmt(c.snapshots[i]);
  o << "\n";
  return o.str();
}

std::vector<std::string> preset_names() { return {"fig6", "fig7", "fig8", "static", "undamped"}; }

RunConfig preset(const std::string& name) {
  RunConfig c;
  c.name = name;
  c.csv = name + "_energy.csv";
  if (name == "fig6") {
    c.feedback = FeedbackKind::sqrt_odd();
  } else if (name == "fig7") {
    c.feedback = FeedbackKind::linear();
  } else if (name == "fig8") {
    c.feedback = FeedbackKind::piecewise();
  } else if (name == "static") {
    c.kind = "static";
    c.csv = "static_solution.csv";
  } else if (name == "undamped") {
    c.width = 0;
    c.P = 0.0;
    c.S = 0.0;
  } else {
    throw ValidationError("unknown preset '" + name + "' (fig6 | fig7 | fig8 | static | undamped)");
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::vector<double> sine_load(const Grid& grid, double amplitude, int mode) {
  return sample(grid, [&](double x, double) { return amplitude * std::sin(mode * x); });
}

RunSpec build_run_spec(const RunConfig& c) {
  c.validate();
  RunSpec s;
  s.grid = build_grid(c.J, c.K, c.l);
  s.model = c.model();
  s.dt = c.dt;
  s.T = c.T;
  s.record_stride = c.record_stride;
  s.snapshot_times = c.snapshots;
  const std::vector<double> load = sine_load(s.grid, c.amplitude, c.mode);
  s.u0 = c.shape == "static" ? solve_static(load, s.grid, c.sigma).u : load;
  s.v0.assign(s.grid.n_dof(), 0.0);
  return s;
}

}  // namespace bergerdeck
