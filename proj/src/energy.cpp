#include "bergerdeck/energy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bergerdeck/banded.hpp"
#include "bergerdeck/errors.hpp"
#include "bergerdeck/model.hpp"
#include "bergerdeck/operators.hpp"

namespace bergerdeck {

namespace {

struct NodeIndex {
  int J;
  std::size_t operator()(int j, int k) const {
    return static_cast<std::size_t>(k) * static_cast<std::size_t>(J + 2) + static_cast<std::size_t>(j);
  }
};

// (level offset, coefficient) pairs of the y-stencil used for first
// y-derivatives at level k: centred inside, one-sided on the free edges.
std::vector<std::pair<int, double>> first_y_stencil(int k, int top, double dy) {
  if (k == 0) return {{0, -1.0 / dy}, {1, 1.0 / dy}};
  if (k == top) return {{top - 1, -1.0 / dy}, {top, 1.0 / dy}};
  return {{k - 1, -0.5 / dy}, {k + 1, 0.5 / dy}};
}

// (x index, coefficient) pairs of u_x at node j in terms of unknowns.
std::vector<std::pair<int, double>> first_x_stencil(int j, int J, double dx) {
  if (j == 0) return {{1, 1.0 / dx}};
  if (j == J + 1) return {{J, -1.0 / dx}};
  std::vector<std::pair<int, double>> s;
  if (j - 1 >= 1) s.push_back({j - 1, -0.5 / dx});
  if (j + 1 <= J) s.push_back({j + 1, 0.5 / dx});
  return s;
}

}  // namespace

FormOperators build_form_operators(const Grid& grid, double sigma, const QuadratureWeights& weights) {
  check_poisson_ratio(sigma);
  const int J = grid.J;
  const int top = grid.K + 1;
  const NodeIndex node{J};
  const std::size_t n_nodes = static_cast<std::size_t>(J + 2) * static_cast<std::size_t>(top + 1);
  const double sx = 1.0 / (grid.dx * grid.dx);
  const double sy = 1.0 / (grid.dy * grid.dy);

  std::vector<Triplet> txx, tyy, tx, ty, txy;
  for (int k = 0; k <= top; ++k)
    for (int j = 0; j <= J + 1; ++j) {
      const std::size_t r = node(j, k);
      const bool interior_x = j >= 1 && j <= J;
      if (interior_x) {
        auto xx = [&](std::vector<Triplet>& out, double factor) {
          if (j > 1) out.push_back({r, grid.flatten(j - 1, k), factor * sx});
          out.push_back({r, grid.flatten(j, k), factor * -2.0 * sx});
          if (j < J) out.push_back({r, grid.flatten(j + 1, k), factor * sx});
        };
        xx(txx, 1.0);
        if (k == 0 || k == top) {
          xx(tyy, -sigma);
        } else {
          tyy.push_back({r, grid.flatten(j, k - 1), sy});
          tyy.push_back({r, grid.flatten(j, k), -2.0 * sy});
          tyy.push_back({r, grid.flatten(j, k + 1), sy});
        }
        for (auto [kk, c] : first_y_stencil(k, top, grid.dy)) ty.push_back({r, grid.flatten(j, kk), c});
      }
      for (auto [jj, c] : first_x_stencil(j, J, grid.dx)) tx.push_back({r, grid.flatten(jj, k), c});
      for (auto [kk, cy] : first_y_stencil(k, top, grid.dy))
        for (auto [jj, cx] : first_x_stencil(j, J, grid.dx)) txy.push_back({r, grid.flatten(jj, kk), cy * cx});
    }

  FormOperators ops;
  ops.grid = grid;
  ops.sigma = sigma;
  const std::size_t n = grid.n_dof();
  ops.uxx = SparseOperator::from_triplets(n_nodes, n, std::move(txx));
  ops.uyy = SparseOperator::from_triplets(n_nodes, n, std::move(tyy));
  ops.ux = SparseOperator::from_triplets(n_nodes, n, std::move(tx));
  ops.uy = SparseOperator::from_triplets(n_nodes, n, std::move(ty));
  ops.uxy = SparseOperator::from_triplets(n_nodes, n, std::move(txy));
  ops.node_weights.resize(n_nodes);
  for (int k = 0; k <= top; ++k)
    for (int j = 0; j <= J + 1; ++j) ops.node_weights[node(j, k)] = weights.cell(j, k);
  return ops;
}

CurvatureField hstar_density(std::span<const double> u, const FormOperators& ops) {
  if (u.size() != ops.grid.n_dof()) throw ShapeError("hstar: field length does not match grid");
  CurvatureField c;
  c.uxx = ops.uxx.apply(u);
  c.uyy = ops.uyy.apply(u);
  c.uxy = ops.uxy.apply(u);
  c.density.resize(c.uxx.size());
  const double s = ops.sigma;
  for (std::size_t i = 0; i < c.density.size(); ++i)
    c.density[i] = c.uxx[i] * c.uxx[i] + c.uyy[i] * c.uyy[i] + 2.0 * s * c.uxx[i] * c.uyy[i] +
                   2.0 * (1.0 - s) * c.uxy[i] * c.uxy[i];
  return c;
}

double hstar_form(std::span<const double> u, const FormOperators& ops) {
  const CurvatureField c = hstar_density(u, ops);
  double total = 0.0;
  for (std::size_t i = 0; i < c.density.size(); ++i) total += ops.node_weights[i] * c.density[i];
  return total;
}

double hstar_form(std::span<const double> u, const Grid& grid, double sigma, const QuadratureWeights& weights) {
  return hstar_form(u, build_form_operators(grid, sigma, weights));
}

SparseOperator hstar_gram(const FormOperators& ops) {
  const auto& w = ops.node_weights;
  const double s = ops.sigma;
  SparseOperator a = add(weighted_gram(ops.uxx, w, ops.uxx), weighted_gram(ops.uyy, w, ops.uyy));
  SparseOperator cross = weighted_gram(ops.uxx, w, ops.uyy);
  a = add(a, add(cross, cross.transpose()), 1.0, s);
  return add(a, weighted_gram(ops.uxy, w, ops.uxy), 1.0, 2.0 * (1.0 - s));
}

SparseOperator dirichlet_gram(const FormOperators& ops) {
  const auto& w = ops.node_weights;
  return add(weighted_gram(ops.ux, w, ops.ux), weighted_gram(ops.uy, w, ops.uy));
}

EnergyMeter::EnergyMeter(const Grid& grid, const QuadratureWeights& weights, double sigma, double P, double S)
    : grid_(grid),
      weights_(weights),
      unknown_weights_(weights.unknown_weights(grid)),
      forms_(build_form_operators(grid, sigma, weights)),
      P_(P),
      S_(S) {}

EnergyRecord EnergyMeter::measure(const SimState& state, double dissipated_cum) const {
  if (state.step_index < 1)
    throw SequencingError("energy: the velocity needs two time levels (step_index >= 1)");
  if (state.u_curr.size() != grid_.n_dof() || state.u_prev.size() != grid_.n_dof())
    throw ShapeError("energy: state length does not match grid");

  EnergyRecord r;
  r.step = state.step_index;
  r.t = state.t;
  double kin = 0.0;
  for (std::size_t i = 0; i < state.u_curr.size(); ++i) {
    const double v = (state.u_curr[i] - state.u_prev[i]) / state.dt;
    kin += unknown_weights_[i] * v * v;
  }
  r.kinetic = 0.5 * kin;
  r.hstar = 0.5 * hstar_form(state.u_curr, forms_);
  const double q = berger_integral(state.u_curr, grid_, weights_);
  r.px = -0.5 * P_ * q;
  r.sx = 0.25 * S_ * q * q;
  r.total = r.kinetic + r.hstar + r.px + r.sx;
  r.dissipated_cum = dissipated_cum;
  return r;
}

double EnergyMeter::damping_power(std::span<const double> damping_force, std::span<const double> velocity) const {
  double s = 0.0;
  for (std::size_t i = 0; i < velocity.size(); ++i) s += unknown_weights_[i] * damping_force[i] * velocity[i];
  return s;
}

double dissipation_residual(std::span<const EnergyRecord> records) {
  if (records.size() < 2) return 0.0;
  double lo = records.front().total + records.front().dissipated_cum;
  double hi = lo;
  for (const auto& r : records) {
    const double balance = r.total + r.dissipated_cum;
    lo = std::min(lo, balance);
    hi = std::max(hi, balance);
  }
  return (hi - lo) / std::max(records.front().total, 1e-300);
}

Lambda1Result lambda1_estimate(const Grid& grid, double sigma, double tolerance, int max_iterations) {
  const QuadratureWeights w = build_weights(grid);
  const FormOperators ops = build_form_operators(grid, sigma, w);
  const SparseOperator a = hstar_gram(ops);
  const SparseOperator b = dirichlet_gram(ops);
  const BandedLU lu(a);

  auto dot = [](std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
  };

  // Start from the lowest hinged mode, slightly tilted in y.
  std::vector<double> x = sample(grid, [&](double xx, double yy) { return std::sin(xx) * (1.0 + 0.1 * yy / grid.l); });
  std::vector<double> bx = b.apply(x);
  std::vector<double> ax = a.apply(x);
  double lambda = dot(x, ax) / dot(x, bx);

  Lambda1Result res;
  const double stop = tolerance * 1e-2;
  for (int it = 1; it <= max_iterations; ++it) {
    x = bx;
    lu.solve_in_place(x);
    b.apply(x, bx);
    a.apply(x, ax);
    const double xbx = dot(x, bx);
    if (!(xbx > 0.0)) throw ConvergenceError("lambda1: iterate left the positive cone of B", lambda);
    const double scale_factor = 1.0 / std::sqrt(xbx);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] *= scale_factor;
      bx[i] *= scale_factor;
      ax[i] *= scale_factor;
    }
    const double next = dot(x, ax);
    res.last_change = std::abs(next - lambda) / std::abs(next);
    lambda = next;
    res.iterations = it;
    if (res.last_change <= stop) {
      res.lambda = lambda;
      return res;
    }
  }
  throw ConvergenceError("lambda1: no convergence after " + std::to_string(max_iterations) + " iterations", lambda);
}

}  // namespace bergerdeck
