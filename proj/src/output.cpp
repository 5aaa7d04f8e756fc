#include "bergerdeck/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "bergerdeck/errors.hpp"

namespace bergerdeck {

namespace {

constexpr const char* kHeader = "step,t,E_total,E_kinetic,E_hstar,E_px,E_sx,dissipated_cum";

std::string escape_xml(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '&': o += "&amp;"; break;
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

// Roughly five "nice" ticks covering [lo, hi].
std::vector<double> nice_ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  std::vector<double> t;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) t.push_back(v);
  return t;
}

}  // namespace

void write_energy_csv(std::ostream& os, std::span<const EnergyRecord> records) {
  os << kHeader << '\n';
  char buf[512];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.step, r.t, r.total, r.kinetic,
                  r.hstar, r.px, r.sx, r.dissipated_cum);
    os << buf;
  }
}

void write_energy_csv(const std::string& path, std::span<const EnergyRecord> records) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  write_energy_csv(f, records);
  f.flush();
  if (!f) throw IoError("write to '" + path + "' failed");
}

std::vector<EnergyRecord> read_energy_csv(std::istream& is) {
  std::vector<EnergyRecord> out;
  std::string line;
  std::size_t n = 0;
  if (!std::getline(is, line)) throw ParseError(1, "energy csv: missing header");
  ++n;
  if (line != kHeader) throw ParseError(1, "energy csv: unexpected header");
  while (std::getline(is, line)) {
    ++n;
    if (line.empty()) continue;
    EnergyRecord r;
    if (std::sscanf(line.c_str(), "%ld,%lf,%lf,%lf,%lf,%lf,%lf,%lf", &r.step, &r.t, &r.total, &r.kinetic, &r.hstar,
                    &r.px, &r.sx, &r.dissipated_cum) != 8)
      throw ParseError(n, "energy csv: expected 8 fields");
    out.push_back(r);
  }
  return out;
}

std::vector<EnergyRecord> read_energy_csv_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read '" + path + "'");
  return read_energy_csv(f);
}

std::string render_svg_plot(std::span<const EnergyRecord> records, PlotScale scale, const std::string& title) {
  const bool logy = scale == PlotScale::LogY;
  std::vector<double> xs, ys;
  std::size_t dropped = 0;
  for (const auto& r : records) {
    if (logy && !(r.total > 0.0)) {
      ++dropped;
      continue;
    }
    xs.push_back(r.t);
    ys.push_back(logy ? std::log10(r.total) : r.total);
  }
  if (xs.size() < 2) throw PlotError("plot: fewer than 2 plottable points");

  const double W = 800.0, H = 500.0, left = 90.0, right = 30.0, top = 50.0, bottom = 60.0;
  double x0 = *std::min_element(xs.begin(), xs.end());
  double x1 = *std::max_element(xs.begin(), xs.end());
  double y0 = *std::min_element(ys.begin(), ys.end());
  double y1 = *std::max_element(ys.begin(), ys.end());
  if (x1 == x0) x1 = x0 + 1.0;
  if (y1 == y0) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * (W - left - right); };
  auto py = [&](double y) { return H - bottom - (y - y0) / (y1 - y0) * (H - top - bottom); };

  std::ostringstream o;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\" viewBox=\"0 0 %g %g\">\n", W, H,
                W, H);
  o << buf;
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">",
                W / 2);
  o << buf << escape_xml(title) << "</text>\n";

  // Axes.
  std::snprintf(buf, sizeof buf, "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n", left, H - bottom,
                W - right, H - bottom);
  o << buf;
  std::snprintf(buf, sizeof buf, "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n", left, top, left,
                H - bottom);
  o << buf;
  for (double t : nice_ticks(x0, x1)) {
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.2f\" y1=\"%g\" x2=\"%.2f\" y2=\"%g\" stroke=\"black\"/>"
                  "<text x=\"%.2f\" y=\"%g\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">%.4g</text>\n",
                  px(t), H - bottom, px(t), H - bottom + 5, px(t), H - bottom + 20, t);
    o << buf;
  }
  for (double t : nice_ticks(y0, y1)) {
    char label[32];
    if (logy)
      std::snprintf(label, sizeof label, "1e%.3g", t);
    else
      std::snprintf(label, sizeof label, "%.4g", t);
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%g\" y1=\"%.2f\" x2=\"%g\" y2=\"%.2f\" stroke=\"black\"/>"
                  "<text x=\"%g\" y=\"%.2f\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">%s</text>\n",
                  left - 5, py(t), left, py(t), left - 8, py(t) + 4, label);
    o << buf;
  }
  std::snprintf(buf, sizeof buf,
                "<text x=\"%g\" y=\"%g\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">t</text>\n",
                (left + W - right) / 2, H - 15);
  o << buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"20\" y=\"%g\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
                "transform=\"rotate(-90 20 %g)\">%s</text>\n",
                H / 2, H / 2, logy ? "E (log scale)" : "E");
  o << buf;
  if (dropped > 0) {
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%g\" y=\"%g\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">dropped=%zu</text>\n",
                  W - right, top - 8, dropped);
    o << buf;
  }

  o << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%.3f,%.3f", i ? " " : "", px(xs[i]), py(ys[i]));
    o << buf;
  }
  o << "\"/>\n</svg>\n";
  return o.str();
}

void emit_svg_plot(std::span<const EnergyRecord> records, const std::string& path, PlotScale scale,
                   const std::string& title) {
  const std::string svg = render_svg_plot(records, scale, title);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << svg;
  f.flush();
  if (!f) throw IoError("write to '" + path + "' failed");
}

}  // namespace bergerdeck
