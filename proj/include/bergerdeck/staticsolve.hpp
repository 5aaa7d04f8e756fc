#pragma once

#include <span>
#include <vector>

#include "bergerdeck/banded.hpp"
#include "bergerdeck/grid.hpp"
#include "bergerdeck/operators.hpp"

namespace bergerdeck {

struct StaticSolution {
  std::vector<double> u;
  double relative_residual = 0.0;
  double backward_error = 0.0;
  double rcond = 0.0;
};

/// Factorization of Delta_h^2 checked by normwise backward error.
FactorizedMatrix factorize_bilaplacian(const Grid& grid, double sigma, double tolerance = 1e-10);

/// Solves the discrete bilaplacian problem Delta_h^2 U = F by banded LU with
/// refinement. The achieved relative residual is reported; acceptance is on
/// the normwise backward error, since on fine grids the relative residual of
/// any double-precision solution sits near eps |A| |U| / |F| (about 1e-9 at
/// J = 149, K = 99). Throws SolveError, with the condition estimate, when the
/// backward error exceeds `tolerance`.
StaticSolution solve_static(std::span<const double> f, const Grid& grid, double sigma, double tolerance = 1e-10);

/// Same, reusing a factorization of the bilaplacian.
StaticSolution solve_static(std::span<const double> f, const FactorizedMatrix& bilaplacian);

/// Closed-form solution of Delta^2 u = c sin(m x) on (0, pi) x (-l, l) with
/// hinged short edges and free long edges:
///   u = [c / m^4 + A cosh(m y) + B y sinh(m y)] sin(m x).
class AnalyticPlate {
 public:
  /// Throws ParameterError for m < 1, l <= 0 or sigma outside (0, 1/2), and
  /// SolveError if the 2 x 2 edge system is singular.
  AnalyticPlate(double c, int m, double l, double sigma);

  double A() const { return A_; }
  double B() const { return B_; }

  double operator()(double x, double y) const;

  /// Partial derivatives d^{px}/dx^{px} d^{py}/dy^{py} u (px, py <= 4).
  double derivative(int px, int py, double x, double y) const;

  /// u on the unknowns of `grid`, flattened.
  std::vector<double> sample_on(const Grid& grid) const;

 private:
  // d^p/dy^p of the y-profile c/m^4 + A cosh(my) + B y sinh(my).
  double profile(int p, double y) const;

  double c_;
  int m_;
  double l_;
  double sigma_;
  double A_ = 0.0;
  double B_ = 0.0;
};

/// Absolute discrete L2 norm sqrt(sum w_i e_i^2) with the deck quadrature.
double discrete_l2(const Grid& grid, const QuadratureWeights& weights, std::span<const double> e);

}  // namespace bergerdeck
