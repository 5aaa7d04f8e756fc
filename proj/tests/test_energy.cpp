#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "bergerdeck/energy.hpp"
#include "bergerdeck/errors.hpp"
#include "bergerdeck/model.hpp"
#include "oracles.hpp"

using namespace bergerdeck;

TEST_CASE("plate form of the zero field") {
  const Grid g = build_grid(5, 3, 1.0);
  CHECK(hstar_form(std::vector<double>(g.n_dof(), 0.0), g, 0.2, build_weights(g)) == 0.0);
}

TEST_CASE("plate form of sin(x) constant in y") {
  const Grid g = build_grid(149, 99, M_PI / 4);
  const auto u = sample(g, [](double x, double) { return std::sin(x); });
  const double f = hstar_form(u, g, 0.2, build_weights(g));
  CHECK(std::abs(f - M_PI * g.l) <= 2e-2 * M_PI * g.l);
}

TEST_CASE("plate form matches the dense oracle") {
  const Grid g = build_grid(7, 5, 0.6);
  const auto u = oracle::random_field(g.n_dof(), 3);
  const double ref = oracle::hstar(oracle::mesh(7, 5, 0.6), oracle::to_eigen(u), 0.3);
  CHECK(hstar_form(u, g, 0.3, build_weights(g)) == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("pointwise lower bound of the density") {
  const Grid g = build_grid(9, 5, 0.8);
  const double sigma = 0.2;
  const FormOperators ops = build_form_operators(g, sigma, build_weights(g));
  for (unsigned seed = 0; seed < 20; ++seed) {
    const auto c = hstar_density(oracle::random_field(g.n_dof(), 100 + seed), ops);
    for (std::size_t i = 0; i < c.density.size(); ++i) {
      const double lower = (1 - sigma) * (c.uxx[i] * c.uxx[i] + c.uyy[i] * c.uyy[i] + 2 * c.uxy[i] * c.uxy[i]);
      CHECK(c.density[i] >= lower - 1e-12 * std::abs(lower));
    }
  }
}

TEST_CASE("plate form is quadratic and agrees with its Gram matrix") {
  const Grid g = build_grid(9, 5, 0.8);
  const QuadratureWeights w = build_weights(g);
  const FormOperators ops = build_form_operators(g, 0.2, w);
  const auto u = oracle::random_field(g.n_dof(), 8);
  std::vector<double> su(u);
  for (auto& v : su) v *= 3.7;
  const double f = hstar_form(u, ops);
  CHECK(hstar_form(su, ops) == doctest::Approx(3.7 * 3.7 * f).epsilon(1e-12));
  const auto au = hstar_gram(ops).apply(u);
  double uau = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) uau += u[i] * au[i];
  CHECK(uau == doctest::Approx(f).epsilon(1e-12));
}

TEST_CASE("energy meter on simple states") {
  const Grid g = build_grid(149, 99, M_PI / 4);
  const QuadratureWeights w = build_weights(g);
  const EnergyMeter meter(g, w, 0.2, 1e-3, 1e-5);
  SimState s;
  s.dt = 0.01;
  s.step_index = 1;
  s.u_curr.assign(g.n_dof(), 0.0);
  s.u_prev.assign(g.n_dof(), 0.0);
  const EnergyRecord z = meter.measure(s);
  CHECK(z.kinetic == 0.0);
  CHECK(z.hstar == 0.0);
  CHECK(z.px == 0.0);
  CHECK(z.sx == 0.0);
  CHECK(z.total == 0.0);

  // V = 1 on every unknown; the hinged ends carry zero velocity, so the
  // Simpson end weights drop out: 1/2 (pi - 2 dx / 3) 2l.
  for (auto& v : s.u_curr) v = s.dt;
  const EnergyRecord k = meter.measure(s);
  CHECK(k.kinetic == doctest::Approx(g.l * (M_PI - 2 * g.dx / 3)).epsilon(1e-12));
  CHECK(std::abs(k.kinetic - M_PI * g.l) <= 2 * g.dx / 3 * g.l + 1e-12);
}

TEST_CASE("energy needs two time levels") {
  const Grid g = build_grid(5, 3, 1.0);
  const EnergyMeter meter(g, build_weights(g), 0.2, 1e-3, 1e-5);
  SimState s;
  s.dt = 0.1;
  s.u_curr.assign(g.n_dof(), 0.0);
  s.u_prev.assign(g.n_dof(), 0.0);
  CHECK_THROWS_AS(meter.measure(s), SequencingError);
}

TEST_CASE("energy recomposition and dense oracle") {
  const oracle::Mesh m = oracle::mesh(5, 3, M_PI / 4);
  const Grid g = build_grid(5, 3, M_PI / 4);
  const double sigma = 0.2, P = 1e-3, S = 1e-5, dt = 0.01;
  // Static solution of Delta^2 u = 50 sin(2x) through the dense oracle.
  const Eigen::MatrixXd A = oracle::bilaplacian(m, sigma);
  const auto f = sample(g, [](double x, double) { return 50 * std::sin(2 * x); });
  const Eigen::VectorXd u0 = A.partialPivLu().solve(oracle::to_eigen(f));

  const EnergyMeter meter(g, build_weights(g), sigma, P, S);
  SimState s;
  s.dt = dt;
  s.step_index = 1;
  s.u_curr.assign(u0.data(), u0.data() + u0.size());
  s.u_prev = s.u_curr;
  const EnergyRecord r = meter.measure(s);
  CHECK(r.kinetic == 0.0);
  CHECK(r.total == doctest::Approx(oracle::energy(m, u0, u0, dt, sigma, P, S)).epsilon(1e-10));

  const auto noise = oracle::random_field(g.n_dof(), 77, 1e-3);
  for (std::size_t i = 0; i < noise.size(); ++i) s.u_prev[i] += noise[i];
  const EnergyRecord q = meter.measure(s);
  CHECK(q.total == doctest::Approx(q.kinetic + q.hstar + q.px + q.sx).epsilon(1e-12));
  CHECK(q.total ==
        doctest::Approx(oracle::energy(m, u0, oracle::to_eigen(s.u_prev), dt, sigma, P, S)).epsilon(1e-10));
}

TEST_CASE("dissipation residual") {
  std::vector<EnergyRecord> flat(5);
  for (auto& r : flat) r.total = 2.0;
  CHECK(dissipation_residual(flat) == 0.0);
  CHECK(dissipation_residual(std::vector<EnergyRecord>(1)) == 0.0);

  std::vector<EnergyRecord> balanced = {{1, 0.0, 0, 0, 0, 0, 4.0, 0.0}, {2, 0.1, 0, 0, 0, 0, 3.0, 1.0},
                                        {3, 0.2, 0, 0, 0, 0, 2.5, 1.5}};
  CHECK(dissipation_residual(balanced) == 0.0);
  balanced[2].dissipated_cum = 1.0;
  CHECK(dissipation_residual(balanced) == doctest::Approx(0.5 / 4.0));
}

TEST_CASE("lambda1 on the smallest grid matches a dense generalized eigensolve") {
  const Grid g = build_grid(5, 3, 1.0);
  const Lambda1Result r = lambda1_estimate(g, 0.2);
  CHECK(r.lambda > 0.0);

  const FormOperators ops = build_form_operators(g, 0.2, build_weights(g));
  const auto da = hstar_gram(ops).to_dense();
  const auto db = dirichlet_gram(ops).to_dense();
  Eigen::MatrixXd A(g.n_dof(), g.n_dof()), B(g.n_dof(), g.n_dof());
  for (std::size_t i = 0; i < g.n_dof(); ++i)
    for (std::size_t j = 0; j < g.n_dof(); ++j) {
      A(i, j) = da[i][j];
      B(i, j) = db[i][j];
    }
  CHECK((A - A.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * A.cwiseAbs().maxCoeff());
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, B);
  const double ref = es.eigenvalues().minCoeff();
  CHECK(r.lambda == doctest::Approx(ref).epsilon(1e-6));

  // Gram matrices reproduce the forms they are built from.
  const auto u = oracle::random_field(g.n_dof(), 12);
  const Eigen::VectorXd eu = oracle::to_eigen(u);
  CHECK(eu.dot(A * eu) == doctest::Approx(oracle::hstar(oracle::mesh(5, 3, 1.0), eu, 0.2)).epsilon(1e-12));
}

TEST_CASE("lambda1 is below every Rayleigh quotient") {
  const Grid g = build_grid(15, 9, 0.7);
  const Lambda1Result r = lambda1_estimate(g, 0.2);
  const FormOperators ops = build_form_operators(g, 0.2, build_weights(g));
  const auto A = hstar_gram(ops);
  const auto B = dirichlet_gram(ops);
  for (unsigned seed = 0; seed < 10; ++seed) {
    const auto u = oracle::random_field(g.n_dof(), 500 + seed);
    const auto au = A.apply(u);
    const auto bu = B.apply(u);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      num += u[i] * au[i];
      den += u[i] * bu[i];
    }
    CHECK(r.lambda <= num / den * (1 + 1e-12));
  }
}

TEST_CASE("lambda1 exceeds the preset prestress") {
  const Lambda1Result r = lambda1_estimate(build_grid(149, 99, M_PI / 4), 0.2);
  CHECK(r.lambda > 1e-3);
}

TEST_CASE("lambda1 budget exhaustion") {
  CHECK_THROWS_AS(lambda1_estimate(build_grid(15, 9, 0.7), 0.2, 1e-8, 1), ConvergenceError);
}
