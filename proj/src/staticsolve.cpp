#include "bergerdeck/staticsolve.hpp"

#include <cmath>

#include "bergerdeck/errors.hpp"

namespace bergerdeck {

StaticSolution solve_static(std::span<const double> f, const FactorizedMatrix& bilaplacian) {
  if (f.size() != bilaplacian.matrix().rows()) throw ShapeError("static: load length does not match grid");
  StaticSolution s;
  s.rcond = bilaplacian.factor().rcond();
  SolveReport r = bilaplacian.solve(f);
  s.u = std::move(r.x);
  s.relative_residual = r.relative_residual;
  s.backward_error = r.backward_error;
  return s;
}

StaticSolution solve_static(std::span<const double> f, const Grid& grid, double sigma, double tolerance) {
  if (f.size() != grid.n_dof()) throw ShapeError("static: load length does not match grid");
  return solve_static(f, factorize_bilaplacian(grid, sigma, tolerance));
}

FactorizedMatrix factorize_bilaplacian(const Grid& grid, double sigma, double tolerance) {
  return FactorizedMatrix(assemble_bilaplacian(grid, sigma), tolerance, 3, ResidualMeasure::BackwardError);
}

AnalyticPlate::AnalyticPlate(double c, int m, double l, double sigma) : c_(c), m_(m), l_(l), sigma_(sigma) {
  if (m < 1) throw ParameterError("analytic plate: m must be >= 1");
  if (!(l > 0.0)) throw ParameterError("analytic plate: l must be > 0");
  check_poisson_ratio(sigma);

  // Free-edge conditions at y = l; the profile is even so y = -l follows.
  // u_yy + sigma u_xx = 0:
  //   A m^2 (1-s) cosh + B (2m cosh + (1-s) m^2 l sinh) = s c / m^2
  // u_yyy + (2-s) u_xxy = 0:
  //   -A m^3 (1-s) sinh + B (m^2 (1+s) sinh - m^3 l (1-s) cosh) = 0
  const double md = m;
  const double s = sigma;
  const double ch = std::cosh(md * l);
  const double sh = std::sinh(md * l);
  const double a11 = md * md * (1.0 - s) * ch;
  const double a12 = 2.0 * md * ch + (1.0 - s) * md * md * l * sh;
  const double a21 = -md * md * md * (1.0 - s) * sh;
  const double a22 = md * md * (1.0 + s) * sh - md * md * md * l * (1.0 - s) * ch;
  const double r1 = s * c / (md * md);
  const double det = a11 * a22 - a12 * a21;
  const double scale = std::abs(a11 * a22) + std::abs(a12 * a21);
  if (!(std::abs(det) > 1e-14 * scale)) throw SolveError("analytic plate: singular edge system", INFINITY);
  A_ = r1 * a22 / det;
  B_ = -a21 * r1 / det;
}

double AnalyticPlate::profile(int p, double y) const {
  const double md = m_;
  const double mp = std::pow(md, p);
  const double ch = std::cosh(md * y);
  const double sh = std::sinh(md * y);
  // d^p cosh(my) = m^p (cosh | sinh); d^p [y sinh(my)] = y m^p (sinh | cosh) + p m^{p-1} (cosh | sinh).
  const bool even = p % 2 == 0;
  double v = A_ * mp * (even ? ch : sh);
  v += B_ * (y * mp * (even ? sh : ch) + (p > 0 ? p * std::pow(md, p - 1) * (even ? ch : sh) : 0.0));
  if (p == 0) v += c_ / (md * md * md * md);
  return v;
}

double AnalyticPlate::operator()(double x, double y) const { return profile(0, y) * std::sin(m_ * x); }

double AnalyticPlate::derivative(int px, int py, double x, double y) const {
  const double md = m_;
  // d^p sin(mx) cycles through sin, cos, -sin, -cos.
  const double mx = md * x;
  double fx = 0.0;
  switch (px % 4) {
    case 0: fx = std::sin(mx); break;
    case 1: fx = std::cos(mx); break;
    case 2: fx = -std::sin(mx); break;
    default: fx = -std::cos(mx); break;
  }
  return std::pow(md, px) * fx * profile(py, y);
}

std::vector<double> AnalyticPlate::sample_on(const Grid& grid) const {
  return sample(grid, [this](double x, double y) { return (*this)(x, y); });
}

double discrete_l2(const Grid& grid, const QuadratureWeights& weights, std::span<const double> e) {
  if (e.size() != grid.n_dof()) throw ShapeError("l2: field length does not match grid");
  const std::vector<double> w = weights.unknown_weights(grid);
  double s = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) s += w[i] * e[i] * e[i];
  return std::sqrt(s);
}

}  // namespace bergerdeck
