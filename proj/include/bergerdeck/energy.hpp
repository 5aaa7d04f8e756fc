#pragma once

#include <span>
#include <vector>

#include "bergerdeck/grid.hpp"
#include "bergerdeck/sparse.hpp"
#include "bergerdeck/state.hpp"

namespace bergerdeck {

/// Difference operators from the unknowns to every quadrature node
/// (j = 0..J+1, k = 0..K+1; node index k (J+2) + j).
///
///  - uxx: centred, zero at the hinged endpoints.
///  - uyy: centred inside; u_yy = -sigma u_xx on the free edges.
///  - ux:  centred, with u_x(0) = U_1/dx and u_x(pi) = -U_J/dx at the ends.
///  - uy:  centred inside, one-sided on the free edges.
///  - uxy: the uy stencil applied to ux.
struct FormOperators {
  Grid grid;
  double sigma = 0.0;
  SparseOperator uxx;
  SparseOperator uyy;
  SparseOperator uxy;
  SparseOperator ux;
  SparseOperator uy;
  std::vector<double> node_weights;
};

FormOperators build_form_operators(const Grid& grid, double sigma, const QuadratureWeights& weights);

/// Per-node values of u_xx, u_yy, u_xy and of
/// F(u,u) = u_xx^2 + u_yy^2 + 2 sigma u_xx u_yy + 2 (1 - sigma) u_xy^2.
struct CurvatureField {
  std::vector<double> uxx;
  std::vector<double> uyy;
  std::vector<double> uxy;
  std::vector<double> density;
};

CurvatureField hstar_density(std::span<const double> u, const FormOperators& ops);

/// Quadrature of F(u, u) (the squared H^2_* norm, without the 1/2).
double hstar_form(std::span<const double> u, const FormOperators& ops);
double hstar_form(std::span<const double> u, const Grid& grid, double sigma, const QuadratureWeights& weights);

/// Gram matrices A (of hstar_form) and B (of the Dirichlet norm
/// integral of |grad u|^2), so that hstar_form(u) = u^T A u.
SparseOperator hstar_gram(const FormOperators& ops);
SparseOperator dirichlet_gram(const FormOperators& ops);

struct EnergyRecord {
  long step = 0;
  double t = 0.0;
  double kinetic = 0.0;
  double hstar = 0.0;
  double px = 0.0;
  double sx = 0.0;
  double total = 0.0;
  double dissipated_cum = 0.0;
};

/// Evaluates the discrete energy
///   E = 1/2 |V|^2 + 1/2 F-quadrature - P/2 |u_x|^2 + S/4 |u_x|^4
/// with V the backward-difference velocity. |u_x|^2 is the same quadrature
/// that feeds the Berger coefficient.
class EnergyMeter {
 public:
  EnergyMeter(const Grid& grid, const QuadratureWeights& weights, double sigma, double P, double S);

  /// Throws SequencingError for a state with step_index < 1.
  EnergyRecord measure(const SimState& state, double dissipated_cum = 0.0) const;

  /// Weighted inner product <a g(V), V> used by the dissipation ledger.
  double damping_power(std::span<const double> damping_force, std::span<const double> velocity) const;

  const FormOperators& forms() const { return forms_; }

 private:
  Grid grid_;
  QuadratureWeights weights_;
  std::vector<double> unknown_weights_;
  FormOperators forms_;
  double P_;
  double S_;
};

/// max over record pairs of |E(t2) - E(t1) + dissipated(t1, t2)| / E(0).
/// Returns 0 for fewer than two records.
double dissipation_residual(std::span<const EnergyRecord> records);

struct Lambda1Result {
  double lambda = 0.0;
  int iterations = 0;
  double last_change = 0.0;
};

/// Smallest generalized eigenvalue of A x = lambda B x by inverse iteration;
/// the discrete analogue of the optimal embedding constant of H^2_* into the
/// Dirichlet space. Throws ConvergenceError when the relative change of the
/// Rayleigh quotient stays above tolerance / 100 after max_iterations.
Lambda1Result lambda1_estimate(const Grid& grid, double sigma, double tolerance = 1e-8, int max_iterations = 5000);

}  // namespace bergerdeck
