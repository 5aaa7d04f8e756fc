#include <doctest.h>

#include <cmath>
#include <sstream>

#include "bergerdeck/errors.hpp"
#include "bergerdeck/integrator.hpp"
#include "bergerdeck/staticsolve.hpp"
#include "oracles.hpp"

using namespace bergerdeck;

namespace {

ModelConfig undamped() {
  ModelConfig m;
  m.P = 0.0;
  m.S = 0.0;
  m.damping_width = 0;
  return m;
}

// Collar indicator built from its definition, independent of damping_mask.
Eigen::VectorXd collar(const oracle::Mesh& m, int width) {
  Eigen::VectorXd a = Eigen::VectorXd::Zero(m.n());
  for (int k = 0; k <= m.K + 1; ++k)
    for (int j = 1; j <= m.J; ++j)
      if (std::min(j, m.J + 1 - j) < width || std::min(k, m.K + 1 - k) < width) a(m.idx(j, k)) = 1.0;
  return a;
}

double max_abs(const Eigen::VectorXd& v) { return v.cwiseAbs().maxCoeff(); }

RunSpec small_run(const ModelConfig& model, double dt, double T) {
  RunSpec spec;
  spec.grid = build_grid(9, 5, 0.6);
  spec.model = model;
  spec.dt = dt;
  spec.T = T;
  spec.record_stride = 1;
  spec.u0 = sample(spec.grid, [](double x, double y) { return std::sin(x) * (1.0 + 0.3 * y); });
  spec.v0.assign(spec.grid.n_dof(), 0.0);
  return spec;
}

}  // namespace

TEST_CASE("bootstrap of the rest state") {
  const Grid g = build_grid(5, 3, 1.0);
  const Dynamics dyn = make_dynamics(g, ModelConfig{0.2, 1e-3, 1e-5, FeedbackKind::linear(), 1});
  const std::vector<double> zero(g.n_dof(), 0.0);
  const SimState s = bootstrap(zero, zero, dyn, 0.01);
  CHECK(s.step_index == 1);
  CHECK(s.t == 0.01);
  for (std::size_t i = 0; i < zero.size(); ++i) {
    CHECK(s.u_curr[i] == 0.0);
    CHECK(s.u_prev[i] == 0.0);
  }
}

TEST_CASE("bootstrap with uniform velocity and no damping") {
  const Grid g = build_grid(5, 3, 1.0);
  const Dynamics dyn = make_dynamics(g, undamped());
  const std::vector<double> zero(g.n_dof(), 0.0);
  const std::vector<double> v0(g.n_dof(), 2.5);
  const SimState s = bootstrap(zero, v0, dyn, 0.01);
  for (double x : s.u_curr) CHECK(x == doctest::Approx(0.025).epsilon(1e-15));
}

TEST_CASE("bootstrap from the static state matches a dense evaluation") {
  const oracle::Mesh m = oracle::mesh(5, 3, M_PI / 4);
  const Grid g = build_grid(5, 3, M_PI / 4);
  const double sigma = 0.2, P = 1e-3, S = 1e-5, dt = 0.01;
  const Dynamics dyn = make_dynamics(g, ModelConfig{sigma, P, S, FeedbackKind::linear(), 1});
  const auto f = sample(g, [](double x, double) { return 50.0 * std::sin(2 * x); });
  const auto u0 = solve_static(f, g, sigma).u;
  const SimState s = bootstrap(u0, std::vector<double>(g.n_dof(), 0.0), dyn, dt);

  const Eigen::VectorXd U0 = oracle::to_eigen(u0);
  const double phi = -P + S * oracle::berger_q(m, U0);
  const Eigen::VectorXd A0 = -oracle::bilaplacian(m, sigma) * U0 - phi * (oracle::dx2(m) * U0);
  const Eigen::VectorXd ref = U0 + 0.5 * dt * dt * A0;
  CHECK(max_abs(oracle::to_eigen(s.u_curr) - ref) <= 1e-12 * std::max(1.0, max_abs(ref)));
  CHECK(oracle::to_eigen(s.u_prev) == U0);
}

TEST_CASE("bootstrap shape checks") {
  const Grid g = build_grid(5, 3, 1.0);
  const Dynamics dyn = make_dynamics(g, undamped());
  CHECK_THROWS_AS(bootstrap(std::vector<double>(3), std::vector<double>(g.n_dof()), dyn, 0.1), ShapeError);
}

TEST_CASE("free recurrence with a zero bilaplacian surrogate") {
  const Grid g = build_grid(5, 3, 1.0);
  Dynamics dyn = make_dynamics(g, undamped());
  dyn.bilaplacian = SparseOperator(g.n_dof(), g.n_dof());
  const FactorizedSystem sys(dyn.bilaplacian, 0.1);
  SimState s;
  s.dt = 0.1;
  s.step_index = 1;
  s.u_prev = oracle::random_field(g.n_dof(), 1);
  s.u_curr = oracle::random_field(g.n_dof(), 2);
  const SimState n = step(s, sys, dyn);
  for (std::size_t i = 0; i < n.u_curr.size(); ++i) CHECK(n.u_curr[i] == 2 * s.u_curr[i] - s.u_prev[i]);
  CHECK(n.u_prev == s.u_curr);
  CHECK(n.step_index == 2);
  CHECK(n.t == doctest::Approx(0.2));
}

TEST_CASE("step from rest stays at rest") {
  const Grid g = build_grid(9, 5, 0.6);
  const Dynamics dyn = make_dynamics(g, ModelConfig{0.2, 1e-3, 1e-5, FeedbackKind::sqrt_odd(), 2});
  const FactorizedSystem sys(dyn.bilaplacian, 0.01);
  SimState s;
  s.dt = 0.01;
  s.step_index = 1;
  s.u_curr.assign(g.n_dof(), 0.0);
  s.u_prev.assign(g.n_dof(), 0.0);
  for (double x : step(s, sys, dyn).u_curr) CHECK(x == 0.0);
}

TEST_CASE("one step matches a dense direct solve") {
  const oracle::Mesh m = oracle::mesh(5, 3, 1.0);
  const Grid g = build_grid(5, 3, 1.0);
  const double sigma = 0.2, P = 1e-3, S = 1e-5, dt = 0.01;
  const int width = 1;
  const Dynamics dyn = make_dynamics(g, ModelConfig{sigma, P, S, FeedbackKind::linear(), width});
  const FactorizedSystem sys(dyn.bilaplacian, dt);
  for (unsigned seed = 0; seed < 5; ++seed) {
    SimState s;
    s.dt = dt;
    s.step_index = 3;
    s.u_curr = oracle::random_field(g.n_dof(), 10 + seed);
    s.u_prev = oracle::random_field(g.n_dof(), 20 + seed);
    const SimState n = step(s, sys, dyn);

    const Eigen::VectorXd Un = oracle::to_eigen(s.u_curr), Um = oracle::to_eigen(s.u_prev);
    const Eigen::MatrixXd A = oracle::bilaplacian(m, sigma);
    const Eigen::MatrixXd M = Eigen::MatrixXd::Identity(m.n(), m.n()) + 0.5 * dt * dt * A;
    const double phi = -P + S * oracle::berger_q(m, Un);
    const Eigen::VectorXd damp = collar(m, width).cwiseProduct((Un - Um) / dt);
    const Eigen::VectorXd rhs = 2 * Un - Um - 0.5 * dt * dt * (A * Un) - dt * dt * (phi * (oracle::dx2(m) * Un) + damp);
    const Eigen::VectorXd ref = M.partialPivLu().solve(rhs);
    CHECK(max_abs(oracle::to_eigen(n.u_curr) - ref) <= 1e-10);
    CHECK(n.t == doctest::Approx(4 * dt));
  }
}

TEST_CASE("system matrix residual contract") {
  const Grid g = build_grid(29, 19, 0.6);
  const Dynamics dyn = make_dynamics(g, undamped());
  for (double dt : {0.1, 0.01, 0.001}) {
    const FactorizedSystem sys(dyn.bilaplacian, dt);
    const auto b = oracle::random_field(g.n_dof(), 9);
    const SolveReport r = sys.solve(b);
    const auto mx = sys.matrix().matrix().apply(r.x);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
      num += (mx[i] - b[i]) * (mx[i] - b[i]);
      den += b[i] * b[i];
    }
    CHECK(std::sqrt(num / den) <= 1e-10);
  }
  CHECK_THROWS_AS(FactorizedSystem(dyn.bilaplacian, 0.0), ParameterError);
}

TEST_CASE("step refuses a factorization for another dt") {
  const Grid g = build_grid(5, 3, 1.0);
  const Dynamics dyn = make_dynamics(g, undamped());
  const FactorizedSystem sys(dyn.bilaplacian, 0.1);
  SimState s;
  s.dt = 0.05;
  s.step_index = 1;
  s.u_curr.assign(g.n_dof(), 0.0);
  s.u_prev.assign(g.n_dof(), 0.0);
  CHECK_THROWS_AS(step(s, sys, dyn), ParameterError);
}

TEST_CASE("non-finite state reports the step") {
  const Grid g = build_grid(5, 3, 1.0);
  const Dynamics dyn = make_dynamics(g, undamped());
  const FactorizedSystem sys(dyn.bilaplacian, 0.1);
  SimState s;
  s.dt = 0.1;
  s.step_index = 6;
  s.u_curr.assign(g.n_dof(), 0.0);
  s.u_prev.assign(g.n_dof(), 0.0);
  s.u_curr[4] = NAN;
  try {
    step(s, sys, dyn);
    FAIL("expected NonFiniteError");
  } catch (const NonFiniteError& e) {
    CHECK(e.step() == 7);
  }
}

TEST_CASE("zero duration keeps only the initial record") {
  RunSpec spec = small_run(undamped(), 0.01, 0.0);
  const RunResult r = run(spec);
  REQUIRE(r.records.size() == 1);
  CHECK(r.records[0].step == 1);
  CHECK(r.records[0].t == 0.01);
}

TEST_CASE("record stride and final record") {
  RunSpec spec = small_run(undamped(), 0.01, 0.255);
  spec.record_stride = 10;
  spec.snapshot_times = {0.1, 0.2};
  const RunResult r = run(spec);
  std::vector<long> steps;
  for (const auto& rec : r.records) steps.push_back(rec.step);
  CHECK(steps == std::vector<long>{1, 10, 20, 26});
  REQUIRE(r.snapshots.size() == 2);
  CHECK(r.snapshots[0].step == 10);
  CHECK(r.snapshots[1].step == 20);
  CHECK(r.max_solve_residual <= 1e-10);
}

TEST_CASE("runs are bitwise deterministic") {
  ModelConfig m;
  m.damping_width = 2;
  m.feedback = FeedbackKind::piecewise();
  const RunSpec spec = small_run(m, 0.01, 1.0);
  const RunResult a = run(spec);
  const RunResult b = run(spec);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].total == b.records[i].total);
    CHECK(a.records[i].dissipated_cum == b.records[i].dissipated_cum);
  }
}

TEST_CASE("dissipation ledger is nonnegative and nondecreasing") {
  for (auto fb : {FeedbackKind::linear(), FeedbackKind::sqrt_odd(), FeedbackKind::piecewise(),
                  FeedbackKind::exp_degenerate()}) {
    ModelConfig m;
    m.damping_width = 2;
    m.feedback = fb;
    RunSpec spec = small_run(m, 0.01, 2.0);
    spec.v0 = sample(spec.grid, [](double x, double) { return 3.0 * std::sin(2 * x); });
    const RunResult r = run(spec);
    double prev = 0.0;
    for (const auto& rec : r.records) {
      CHECK(rec.dissipated_cum >= prev);
      prev = rec.dissipated_cum;
    }
  }
}

TEST_CASE("damped energy is non-increasing for each feedback") {
  for (auto fb : {FeedbackKind::linear(), FeedbackKind::sqrt_odd(), FeedbackKind::piecewise()}) {
    ModelConfig m;
    m.damping_width = 2;
    m.feedback = fb;
    const RunResult r = run(small_run(m, 0.01, 3.0));
    const double e0 = r.records.front().total;
    for (std::size_t i = 2; i < r.records.size(); ++i)
      CHECK(r.records[i].total <= r.records[i - 1].total + 1e-12 * e0);
  }
}

TEST_CASE("undamped linear scheme is stable for large steps") {
  for (double dt : {0.1, 0.01, 0.001}) {
    const RunResult r = run(small_run(undamped(), dt, 10.0));
    const double e0 = r.records.front().total;
    double emax = 0.0;
    for (const auto& rec : r.records) emax = std::max(emax, rec.total);
    CHECK(emax <= 1.05 * e0);
    CHECK(r.records.back().dissipated_cum == 0.0);
  }
}

TEST_CASE("undamped energy drift shrinks linearly with dt") {
  // Initial data from the static problem satisfies the discrete edge
  // conditions, so the drift is in its asymptotic regime.
  auto drift = [](double dt) {
    RunSpec spec = small_run(undamped(), dt, 10.0);
    spec.record_stride = 100000;
    spec.u0 = solve_static(sample(spec.grid, [](double x, double) { return 50.0 * std::sin(2 * x); }), spec.grid, 0.2).u;
    const RunResult r = run(spec);
    return std::abs(r.records.back().total - r.records.front().total) / r.records.front().total;
  };
  const double ratio = drift(1e-3) / drift(5e-4);
  CHECK(ratio >= 1.8);
  CHECK(ratio <= 2.2);
}

TEST_CASE("snapshot CSV layout") {
  const Grid g = build_grid(5, 3, 1.0);
  std::vector<double> u(g.n_dof());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = 0.5 * static_cast<double>(i);
  std::ostringstream os;
  write_snapshot_csv(os, g, u);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "k,j,x,y,value");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == static_cast<int>(g.n_dof()));
  CHECK(os.str().find("\n0,1,0.52359877559829882,-1,0\n") != std::string::npos);
  CHECK_THROWS_AS(write_snapshot_csv(os, g, std::vector<double>(2)), ShapeError);
}
