#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "bergerdeck/banded.hpp"
#include "bergerdeck/energy.hpp"
#include "bergerdeck/grid.hpp"
#include "bergerdeck/model.hpp"
#include "bergerdeck/sparse.hpp"
#include "bergerdeck/state.hpp"

namespace bergerdeck {

/// Everything the right-hand side of the scheme needs. `bilaplacian` may be
/// swapped for a surrogate (e.g. the zero matrix) in tests.
struct Dynamics {
  Grid grid;
  QuadratureWeights weights;
  double sigma = 0.0;
  SparseOperator bilaplacian;
  SparseOperator dx2;
  std::vector<double> a;
  FeedbackKind feedback;
  double P = 0.0;
  double S = 0.0;
};

/// Assembles the operators, weights and damping collar for `model`.
Dynamics make_dynamics(const Grid& grid, const ModelConfig& model);

/// a(x, y) g(V) per node.
std::vector<double> damping_force(std::span<const double> v, const Dynamics& dyn);

/// -Delta_h^2 U - phi(U) D_x^2 U - a g(V).
std::vector<double> acceleration(std::span<const double> u, std::span<const double> v, const Dynamics& dyn);

/// M = I + (dt^2 / 2) Delta_h^2, factored once. Solves are checked to a
/// relative residual of 1e-10.
class FactorizedSystem {
 public:
  FactorizedSystem(const SparseOperator& bilaplacian, double dt, double tolerance = 1e-10);

  double dt() const { return dt_; }
  const FactorizedMatrix& matrix() const { return m_; }
  SolveReport solve(std::span<const double> b) const { return m_.solve(b); }

 private:
  double dt_;
  FactorizedMatrix m_;
};

/// Second-order Taylor start: u_prev = U0, u_curr = U0 + dt V0 + dt^2/2 A0,
/// with A0 = acceleration(U0, V0). The returned state has step_index 1 and
/// t = dt.
SimState bootstrap(std::span<const double> u0, std::span<const double> v0, const Dynamics& dyn, double dt);

/// One step of
///   M U^{n+1} = 2 U^n - U^{n-1} - dt^2/2 Delta_h^2 U^n
///               - dt^2 [phi(U^n) D_x^2 U^n + a g((U^n - U^{n-1}) / dt)].
/// Throws NonFiniteError when the new level contains NaN or Inf.
SimState step(const SimState& state, const FactorizedSystem& sys, const Dynamics& dyn);

struct Snapshot {
  long step = 0;
  double t = 0.0;
  std::vector<double> u;
};

struct RunSpec {
  Grid grid;
  ModelConfig model;
  double dt = 0.01;
  double T = 30.0;
  int record_stride = 10;
  std::vector<double> u0;
  std::vector<double> v0;
  std::vector<double> snapshot_times;
};

struct RunResult {
  std::vector<EnergyRecord> records;
  std::vector<Snapshot> snapshots;
  /// Largest relative residual of the per-step solves.
  double max_solve_residual = 0.0;
};

/// Bootstraps, then steps until step_index = max(1, round(T / dt)). The
/// bootstrap state is the first record; afterwards every record_stride-th
/// step and the final step are recorded. The dissipation ledger accumulates
/// dt/2 (D_n + D_{n+1}) with D = <a g(V), V> every step. Snapshots are taken
/// at the step nearest each requested time.
RunResult run(const RunSpec& spec);

/// Same, with a prebuilt system (shared read-only across concurrent runs).
RunResult run(const RunSpec& spec, const Dynamics& dyn, const FactorizedSystem& sys);

/// CSV rows "k,j,x,y,value" for every unknown, with a header line.
void write_snapshot_csv(std::ostream& os, const Grid& grid, std::span<const double> u);

}  // namespace bergerdeck
