#include "bergerdeck/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "bergerdeck/errors.hpp"

namespace bergerdeck {

Grid build_grid(int J, int K, double l) {
  if (J < 5) throw SizingError("grid: J must be >= 5, got " + std::to_string(J));
  if (K < 3) throw SizingError("grid: K must be >= 3, got " + std::to_string(K));
  if (!(l > 0.0) || !std::isfinite(l)) throw SizingError("grid: half-width l must be > 0");
  Grid g;
  g.J = J;
  g.K = K;
  g.l = l;
  g.dx = std::numbers::pi / (J + 1);
  g.dy = 2.0 * l / (K + 1);
  return g;
}

QuadratureWeights build_weights(const Grid& grid) {
  if ((grid.J + 1) % 2 != 0)
    throw SizingError("weights: Simpson rule needs an even interval count, J+1 = " + std::to_string(grid.J + 1));

  QuadratureWeights w;
  w.wx.resize(static_cast<std::size_t>(grid.J) + 2);
  const double third = grid.dx / 3.0;
  for (int j = 0; j <= grid.J + 1; ++j) {
    double c = (j % 2 == 1) ? 4.0 : 2.0;
    if (j == 0 || j == grid.J + 1) c = 1.0;
    w.wx[static_cast<std::size_t>(j)] = c * third;
  }
  w.wy.assign(static_cast<std::size_t>(grid.K) + 2, grid.dy);
  w.wy.front() = 0.5 * grid.dy;
  w.wy.back() = 0.5 * grid.dy;
  return w;
}

std::vector<double> QuadratureWeights::unknown_weights(const Grid& grid) const {
  std::vector<double> out(grid.n_dof());
  for (int k = 0; k <= grid.K + 1; ++k)
    for (int j = 1; j <= grid.J; ++j) out[grid.flatten(j, k)] = cell(j, k);
  return out;
}

double integrate(const Grid& grid, const QuadratureWeights& weights, std::span<const double> field) {
  if (field.size() != grid.n_dof()) throw ShapeError("integrate: field length does not match grid");
  double total = 0.0;
  for (int k = 0; k <= grid.K + 1; ++k) {
    double row = 0.0;
    for (int j = 1; j <= grid.J; ++j) row += weights.wx[static_cast<std::size_t>(j)] * field[grid.flatten(j, k)];
    total += weights.wy[static_cast<std::size_t>(k)] * row;
  }
  return total;
}

}  // namespace bergerdeck
