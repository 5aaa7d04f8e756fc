#include "bergerdeck/integrator.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "bergerdeck/errors.hpp"
#include "bergerdeck/operators.hpp"

namespace bergerdeck {

Dynamics make_dynamics(const Grid& grid, const ModelConfig& model) {
  model.validate();
  Dynamics d;
  d.grid = grid;
  d.weights = build_weights(grid);
  d.sigma = model.sigma;
  d.bilaplacian = assemble_bilaplacian(grid, model.sigma);
  d.dx2 = assemble_dx2(grid);
  d.a = damping_mask(grid, model.damping_width).a;
  d.feedback = model.feedback;
  d.P = model.P;
  d.S = model.S;
  return d;
}

std::vector<double> damping_force(std::span<const double> v, const Dynamics& dyn) {
  std::vector<double> f(v.size(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (dyn.a[i] != 0.0) f[i] = dyn.a[i] * eval_feedback(dyn.feedback, v[i]);
  return f;
}

namespace {

void check_length(std::span<const double> v, const Grid& grid, const char* what) {
  if (v.size() != grid.n_dof()) throw ShapeError(std::string("integrator: ") + what + " length does not match grid");
}

}  // namespace

std::vector<double> acceleration(std::span<const double> u, std::span<const double> v, const Dynamics& dyn) {
  check_length(u, dyn.grid, "U");
  check_length(v, dyn.grid, "V");
  const double phi = berger_coefficient(u, dyn.grid, dyn.weights, dyn.P, dyn.S);
  std::vector<double> acc = dyn.bilaplacian.apply(u);
  const std::vector<double> uxx = dyn.dx2.apply(u);
  const std::vector<double> damp = damping_force(v, dyn);
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = -acc[i] - phi * uxx[i] - damp[i];
  return acc;
}

FactorizedSystem::FactorizedSystem(const SparseOperator& bilaplacian, double dt, double tolerance)
    : dt_(dt),
      m_(add(SparseOperator::identity(bilaplacian.rows()), bilaplacian, 1.0, 0.5 * dt * dt), tolerance) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ParameterError("integrator: dt must be positive");
}

SimState bootstrap(std::span<const double> u0, std::span<const double> v0, const Dynamics& dyn, double dt) {
  if (!(dt > 0.0)) throw ParameterError("integrator: dt must be positive");
  const std::vector<double> a0 = acceleration(u0, v0, dyn);
  SimState s;
  s.dt = dt;
  s.t = dt;
  s.step_index = 1;
  s.u_prev.assign(u0.begin(), u0.end());
  s.u_curr.resize(u0.size());
  const double h = 0.5 * dt * dt;
  for (std::size_t i = 0; i < u0.size(); ++i) s.u_curr[i] = u0[i] + dt * v0[i] + h * a0[i];
  return s;
}

namespace {

SimState step_impl(const SimState& state, const FactorizedSystem& sys, const Dynamics& dyn, double* residual) {
  check_length(state.u_curr, dyn.grid, "U^n");
  check_length(state.u_prev, dyn.grid, "U^{n-1}");
  if (std::abs(sys.dt() - state.dt) > 1e-15 * state.dt)
    throw ParameterError("integrator: factorization built for a different dt");
  const double dt = state.dt;
  const std::size_t n = state.u_curr.size();
  const std::vector<double> v = state.velocity();
  const double phi = berger_coefficient(state.u_curr, dyn.grid, dyn.weights, dyn.P, dyn.S);
  const std::vector<double> bu = dyn.bilaplacian.apply(state.u_curr);
  const std::vector<double> uxx = dyn.dx2.apply(state.u_curr);
  const std::vector<double> damp = damping_force(v, dyn);

  std::vector<double> rhs(n);
  const double h = 0.5 * dt * dt;
  const double dt2 = dt * dt;
  for (std::size_t i = 0; i < n; ++i)
    rhs[i] = 2.0 * state.u_curr[i] - state.u_prev[i] - h * bu[i] - dt2 * (phi * uxx[i] + damp[i]);

  SimState next;
  next.dt = dt;
  next.step_index = state.step_index + 1;
  next.t = static_cast<double>(next.step_index) * dt;
  for (double x : rhs)
    if (!std::isfinite(x)) throw NonFiniteError(next.step_index);
  SolveReport rep = sys.solve(rhs);
  if (residual) *residual = rep.relative_residual;
  for (double x : rep.x)
    if (!std::isfinite(x)) throw NonFiniteError(next.step_index);
  next.u_prev = state.u_curr;
  next.u_curr = std::move(rep.x);
  return next;
}

}  // namespace

SimState step(const SimState& state, const FactorizedSystem& sys, const Dynamics& dyn) {
  return step_impl(state, sys, dyn, nullptr);
}

RunResult run(const RunSpec& spec) {
  const Dynamics dyn = make_dynamics(spec.grid, spec.model);
  const FactorizedSystem sys(dyn.bilaplacian, spec.dt);
  return run(spec, dyn, sys);
}

RunResult run(const RunSpec& spec, const Dynamics& dyn, const FactorizedSystem& sys) {
  if (!(spec.T >= 0.0) || !std::isfinite(spec.T)) throw ParameterError("run: T must be finite and >= 0");
  if (spec.record_stride < 1) throw ParameterError("run: record_stride must be >= 1");
  const long n_steps = std::max(1L, std::lround(spec.T / spec.dt));

  const EnergyMeter meter(dyn.grid, dyn.weights, dyn.sigma, dyn.P, dyn.S);
  RunResult out;

  std::vector<long> snap_steps;
  for (double ts : spec.snapshot_times) snap_steps.push_back(std::max(1L, std::lround(ts / spec.dt)));
  auto take_snapshots = [&](const SimState& s) {
    for (long k : snap_steps)
      if (k == s.step_index) out.snapshots.push_back({s.step_index, s.t, s.u_curr});
  };

  auto power = [&](const SimState& s) {
    const std::vector<double> v = s.velocity();
    return meter.damping_power(damping_force(v, dyn), v);
  };

  SimState s = bootstrap(spec.u0, spec.v0, dyn, spec.dt);
  for (double x : s.u_curr)
    if (!std::isfinite(x)) throw NonFiniteError(1);
  double cum = 0.0;
  double d_prev = power(s);
  out.records.push_back(meter.measure(s, cum));
  take_snapshots(s);

  while (s.step_index < n_steps) {
    double res = 0.0;
    s = step_impl(s, sys, dyn, &res);
    out.max_solve_residual = std::max(out.max_solve_residual, res);
    const double d = power(s);
    cum += 0.5 * spec.dt * (d_prev + d);
    d_prev = d;
    if (s.step_index % spec.record_stride == 0 || s.step_index == n_steps)
      out.records.push_back(meter.measure(s, cum));
    take_snapshots(s);
  }
  return out;
}

void write_snapshot_csv(std::ostream& os, const Grid& grid, std::span<const double> u) {
  check_length(u, grid, "snapshot");
  os << "k,j,x,y,value\n";
  char buf[128];
  for (int k = 0; k <= grid.K + 1; ++k)
    for (int j = 1; j <= grid.J; ++j) {
      std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.17g\n", k, j, grid.x(j), grid.y(k), u[grid.flatten(j, k)]);
      os << buf;
    }
}

}  // namespace bergerdeck
