// Command-line driver: run, static, decay-fit, sweep, lambda1.
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "bergerdeck/config.hpp"
#include "bergerdeck/decaylaw.hpp"
#include "bergerdeck/energy.hpp"
#include "bergerdeck/errors.hpp"
#include "bergerdeck/integrator.hpp"
#include "bergerdeck/output.hpp"
#include "bergerdeck/staticsolve.hpp"

namespace bd = bergerdeck;

namespace {

struct Common {
  std::string config;
  std::string preset;
  std::string out;
  std::string svg;
  std::optional<double> dt;
  std::optional<double> T;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "Config file");
  app->add_option("--preset", c.preset, "fig6 | fig7 | fig8 | static | undamped");
  app->add_option("--out", c.out, "Output CSV path");
  app->add_option("--svg", c.svg, "SVG plot path");
  app->add_option("--dt", c.dt, "Override time step");
  app->add_option("--T", c.T, "Override final time");
}

bd::RunConfig resolve(const Common& c, const std::string& fallback) {
  if (!c.config.empty() && !c.preset.empty()) throw bd::ValidationError("use either --config or --preset, not both");
  bd::RunConfig cfg = !c.config.empty() ? bd::load_config(c.config) : bd::preset(c.preset.empty() ? fallback : c.preset);
  if (!c.out.empty()) cfg.csv = c.out;
  if (!c.svg.empty()) cfg.svg = c.svg;
  if (c.dt) cfg.dt = *c.dt;
  if (c.T) cfg.T = *c.T;
  cfg.validate();
  return cfg;
}

std::string snapshot_path(const std::string& csv, long step) {
  std::string stem = csv;
  if (stem.size() > 4 && stem.compare(stem.size() - 4, 4, ".csv") == 0) stem.resize(stem.size() - 4);
  return stem + "_snap_" + std::to_string(step) + ".csv";
}

struct RunSummary {
  bd::RunResult result;
  bd::FitResult fit;
  bool fitted = false;
  std::string fit_error;
  double seconds = 0.0;
};

RunSummary execute_dynamic(const bd::RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const bd::RunSpec spec = bd::build_run_spec(cfg);
  RunSummary s;
  s.result = bd::run(spec);
  s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bd::write_energy_csv(cfg.csv, s.result.records);
  for (const auto& snap : s.result.snapshots) {
    std::ofstream f(snapshot_path(cfg.csv, snap.step));
    if (!f) throw bd::IoError("cannot open snapshot file for '" + cfg.csv + "'");
    bd::write_snapshot_csv(f, spec.grid, snap.u);
  }
  if (!cfg.svg.empty())
    bd::emit_svg_plot(s.result.records, cfg.svg, cfg.svg_scale == "logy" ? bd::PlotScale::LogY : bd::PlotScale::Linear,
                      cfg.name + ": energy, g = " + cfg.feedback.name());
  std::vector<double> t, e;
  for (const auto& r : s.result.records) {
    t.push_back(r.t);
    e.push_back(r.total);
  }
  try {
    s.fit = bd::fit_decay(t, e, cfg.tail_fraction);
    s.fitted = true;
  } catch (const bd::FitError& e) {
    s.fit_error = e.what();
  }
  return s;
}

void print_run(const bd::RunConfig& cfg, const RunSummary& s) {
  const auto& rec = s.result.records;
  long rises = 0;
  const double e0 = rec.front().total;
  for (std::size_t i = 1; i < rec.size(); ++i)
    if (rec[i].step > 2 && rec[i].total > rec[i - 1].total + 1e-12 * e0) ++rises;
  std::printf("preset/name      %s (feedback %s)\n", cfg.name.c_str(), cfg.feedback.name().c_str());
  std::printf("grid             J=%d K=%d l=%.6g  dt=%.6g T=%.6g\n", cfg.J, cfg.K, cfg.l, cfg.dt, cfg.T);
  std::printf("records          %zu  -> %s\n", rec.size(), cfg.csv.c_str());
  std::printf("E first / last   %.10g / %.10g\n", e0, rec.back().total);
  std::printf("dissipated       %.10g\n", rec.back().dissipated_cum);
  std::printf("energy rises     %ld (tolerance 1e-12 E0, between records)\n", rises);
  std::printf("dissipation res. %.6g\n", bd::dissipation_residual(rec));
  std::printf("max solve resid. %.3g\n", s.result.max_solve_residual);
  if (s.fitted)
    std::printf("tail fit         %s, rate_or_exponent=%.6g, r2_exp=%.6f, r2_alg=%.6f\n", s.fit.best.c_str(),
                s.fit.rate_or_exponent, s.fit.r2_exp, s.fit.r2_alg);
  else
    std::printf("tail fit         skipped (%s)\n", s.fit_error.c_str());
  std::printf("wall time        %.1f s\n", s.seconds);
}

int cmd_run(const Common& c) {
  const bd::RunConfig cfg = resolve(c, "fig7");
  if (cfg.kind == "static") throw bd::ValidationError("config kind is static; use the 'static' subcommand");
  print_run(cfg, execute_dynamic(cfg));
  return 0;
}

int cmd_static(const Common& c) {
  bd::RunConfig cfg = resolve(c, "static");
  if (c.out.empty() && cfg.kind != "static") cfg.csv = "static_solution.csv";
  const bd::Grid g = bd::build_grid(cfg.J, cfg.K, cfg.l);
  const auto t0 = std::chrono::steady_clock::now();
  const bd::StaticSolution sol = bd::solve_static(bd::sine_load(g, cfg.amplitude, cfg.mode), g, cfg.sigma);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bd::AnalyticPlate exact(cfg.amplitude, cfg.mode, cfg.l, cfg.sigma);
  std::vector<double> err = exact.sample_on(g);
  double emax = 0.0;
  for (std::size_t i = 0; i < err.size(); ++i) {
    err[i] -= sol.u[i];
    emax = std::max(emax, std::abs(err[i]));
  }
  const double l2 = bd::discrete_l2(g, bd::build_weights(g), err);
  std::ofstream f(cfg.csv);
  if (!f) throw bd::IoError("cannot open '" + cfg.csv + "' for writing");
  bd::write_snapshot_csv(f, g, sol.u);
  std::printf("static solve     J=%d K=%d sigma=%.6g load %.6g sin(%d x)\n", cfg.J, cfg.K, cfg.sigma, cfg.amplitude,
              cfg.mode);
  std::printf("relative resid.  %.3g (backward error %.3g, rcond %.3g)\n", sol.relative_residual, sol.backward_error,
              sol.rcond);
  std::printf("L2 error         %.6g (squared %.6g), max error %.6g vs closed form\n", l2, l2 * l2, emax);
  std::printf("solution         -> %s\n", cfg.csv.c_str());
  std::printf("wall time        %.2f s\n", secs);
  return 0;
}

int cmd_decay_fit(const std::string& input, double tail, const std::string& label, const std::string& feedback,
                  std::optional<double> p0) {
  const auto rec = bd::read_energy_csv_file(input);
  std::vector<double> t, e;
  for (const auto& r : rec) {
    t.push_back(r.t);
    e.push_back(r.total);
  }
  const bd::FitResult fit = bd::fit_decay(t, e, tail);
  std::printf("%s\n%s\n", bd::fit_report_header().c_str(), bd::fit_report_row(label, fit).c_str());
  if (!feedback.empty()) {
    const bd::FeedbackKind kind = bd::FeedbackKind::parse(feedback);
    for (const auto& cand : bd::candidate_laws(kind, p0))
      std::printf("candidate H~%-8s %s\n", cand.map.c_str(), bd::describe(cand.law).c_str());
  }
  return 0;
}

int cmd_sweep(const std::string& dir, std::optional<double> dt, std::optional<double> T) {
  const std::vector<std::string> names = {"fig6", "fig7", "fig8"};
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("BERGERDECK_THREADS")) {
    const int cap = std::atoi(env);
    if (cap < 1) throw bd::ValidationError("BERGERDECK_THREADS must be a positive integer");
    threads = std::min<unsigned>(threads, static_cast<unsigned>(cap));
  }
  threads = std::min<unsigned>(threads, static_cast<unsigned>(names.size()));

  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw bd::IoError("cannot create directory '" + dir + "': " + ec.message());

  std::vector<bd::RunConfig> cfgs;
  for (const auto& n : names) {
    bd::RunConfig c = bd::preset(n);
    c.csv = dir + "/" + n + "_energy.csv";
    c.svg = dir + "/" + n + "_energy.svg";
    if (dt) c.dt = *dt;
    if (T) c.T = *T;
    c.validate();
    cfgs.push_back(c);
  }
  std::vector<RunSummary> out(cfgs.size());
  std::vector<std::exception_ptr> errors(cfgs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < cfgs.size();) {
      try {
        out[i] = execute_dynamic(cfgs[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  const std::string report = dir + "/fit_report.csv";
  std::ofstream f(report);
  if (!f) throw bd::IoError("cannot open '" + report + "' for writing");
  f << bd::fit_report_header() << '\n';
  std::printf("%s\n", bd::fit_report_header().c_str());
  for (std::size_t i = 0; i < cfgs.size(); ++i) {
    if (!out[i].fitted) throw bd::FitError("sweep: " + names[i] + ": " + out[i].fit_error);
    const std::string row = bd::fit_report_row(names[i], out[i].fit);
    f << row << '\n';
    std::printf("%s\n", row.c_str());
  }
  for (std::size_t i = 0; i < cfgs.size(); ++i)
    std::printf("%s: dissipation residual %.6g, E %.6g -> %.6g, %.1f s\n", names[i].c_str(),
                bd::dissipation_residual(out[i].result.records), out[i].result.records.front().total,
                out[i].result.records.back().total, out[i].seconds);
  return 0;
}

int cmd_lambda1(const Common& c) {
  const bd::RunConfig cfg = resolve(c, "fig7");
  const bd::Grid g = bd::build_grid(cfg.J, cfg.K, cfg.l);
  const bd::Lambda1Result r = bd::lambda1_estimate(g, cfg.sigma);
  std::printf("lambda1          %.12g (%d iterations, last change %.3g)\n", r.lambda, r.iterations, r.last_change);
  std::printf("P                %.6g -> %s\n", cfg.P, cfg.P <= r.lambda ? "P <= lambda1, energy nonnegative"
                                                                         : "P > lambda1, energy may be negative");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Berger plate deck with localized nonlinear damping"};
  app.require_subcommand(1);

  Common run_opts, static_opts, lambda_opts;
  auto* run = app.add_subcommand("run", "Time-march a preset or config and write the energy CSV");
  add_common(run, run_opts);
  auto* st = app.add_subcommand("static", "Solve the static load problem and compare with the closed form");
  add_common(st, static_opts);
  auto* l1 = app.add_subcommand("lambda1", "Estimate the embedding constant Lambda_1 on the configured grid");
  add_common(l1, lambda_opts);

  std::string fit_input, fit_label = "series", fit_feedback;
  double fit_tail = 0.5;
  std::optional<double> fit_p0;
  auto* fit = app.add_subcommand("decay-fit", "Classify the decay of an energy CSV");
  fit->add_option("--input", fit_input, "Energy CSV")->required();
  fit->add_option("--tail", fit_tail, "Trailing fraction of the series to fit");
  fit->add_option("--label", fit_label, "Preset column of the report row");
  fit->add_option("--feedback", fit_feedback, "Also list the candidate laws for this feedback");
  fit->add_option("--p0", fit_p0, "Integrability index for laws at infinity");

  std::string sweep_dir = ".";
  std::optional<double> sweep_dt, sweep_T;
  auto* sweep = app.add_subcommand("sweep", "Run fig6, fig7 and fig8 and write the fit report");
  sweep->add_option("--out", sweep_dir, "Output directory");
  sweep->add_option("--dt", sweep_dt, "Override time step");
  sweep->add_option("--T", sweep_T, "Override final time");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) return cmd_run(run_opts);
    if (*st) return cmd_static(static_opts);
    if (*l1) return cmd_lambda1(lambda_opts);
    if (*fit) return cmd_decay_fit(fit_input, fit_tail, fit_label, fit_feedback, fit_p0);
    if (*sweep) return cmd_sweep(sweep_dir, sweep_dt, sweep_T);
  } catch (const bd::InputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const bd::RuntimeFailure& e) {
    std::fprintf(stderr, "failure: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "failure: %s\n", e.what());
    return 2;
  }
  return 0;
}
