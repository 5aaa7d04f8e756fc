#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace bergerdeck {

/// Uniform node layout of the deck Omega = (0, pi) x (-l, l).
///
/// x-nodes are x_j = j dx for j = 0..J+1; the hinged endpoints j = 0 and
/// j = J+1 carry u = 0 and are not unknowns. y-nodes are y_k = -l + k dy for
/// k = 0..K+1 and all of them are unknowns (the long edges are free).
/// Unknowns are stored level by level: flatten(j, k) = k J + (j - 1).
struct Grid {
  int J = 0;
  int K = 0;
  double l = 0.0;
  double dx = 0.0;
  double dy = 0.0;

  std::size_t n_dof() const { return static_cast<std::size_t>(J) * static_cast<std::size_t>(K + 2); }
  int levels() const { return K + 2; }

  std::size_t flatten(int j, int k) const {
    return static_cast<std::size_t>(k) * static_cast<std::size_t>(J) + static_cast<std::size_t>(j - 1);
  }
  std::pair<int, int> unflatten(std::size_t idx) const {
    return {static_cast<int>(idx % static_cast<std::size_t>(J)) + 1,
            static_cast<int>(idx / static_cast<std::size_t>(J))};
  }

  double x(int j) const { return j * dx; }
  double y(int k) const { return -l + k * dy; }
};

/// Throws SizingError unless J >= 5, K >= 3 and l > 0.
Grid build_grid(int J, int K, double l);

/// Simpson weights along x (every node j = 0..J+1, so they sum to pi) and
/// trapezoid weights along y (k = 0..K+1, summing to 2l).
struct QuadratureWeights {
  std::vector<double> wx;
  std::vector<double> wy;

  double cell(int j, int k) const { return wx[static_cast<std::size_t>(j)] * wy[static_cast<std::size_t>(k)]; }

  /// Weight of each unknown in flattened order.
  std::vector<double> unknown_weights(const Grid& grid) const;
};

/// Throws SizingError when J+1 is odd (Simpson needs an even interval count).
QuadratureWeights build_weights(const Grid& grid);

/// Quadrature of a field stored on the unknowns; the hinged endpoints
/// contribute exact zeros.
double integrate(const Grid& grid, const QuadratureWeights& weights, std::span<const double> field);

/// Samples f(x, y) on the unknowns in flattened order.
template <class F>
std::vector<double> sample(const Grid& grid, F&& f) {
  std::vector<double> out(grid.n_dof());
  for (int k = 0; k <= grid.K + 1; ++k)
    for (int j = 1; j <= grid.J; ++j) out[grid.flatten(j, k)] = f(grid.x(j), grid.y(k));
  return out;
}

}  // namespace bergerdeck
