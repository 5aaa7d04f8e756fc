#pragma once

#include <array>
#include <string>
#include <vector>

#include "bergerdeck/grid.hpp"
#include "bergerdeck/sparse.hpp"

namespace bergerdeck {

/// n x n second difference [1, -2, 1] / h^2 with homogeneous Dirichlet ends.
SparseOperator assemble_d2_1d(int n, double h);

/// n x n hinged fourth difference [1, -4, 6, -4, 1] / h^4. The hinged ends
/// (u = u_xx = 0) give the odd ghost U_{-1} = -U_1, so the corner diagonal is
/// 5 / h^4 and the operator equals the square of assemble_d2_1d.
SparseOperator assemble_d4_hinged_1d(int n, double h);

/// I (x) D2 / dx^2 over all y-levels.
SparseOperator assemble_dx2(const Grid& grid);
/// I (x) D4 / dx^4 over all y-levels.
SparseOperator assemble_dx4(const Grid& grid);

/// Second y-difference. Interior levels use [I, -2I, I] / dy^2; the free-edge
/// levels k = 0, K+1 return the boundary value u_yy = -sigma u_xx directly.
SparseOperator assemble_dy2(const Grid& grid, double sigma);

/// Fourth y-difference with the free-edge ghosts U_{-1}, U_{-2} (mirrored at
/// the top) eliminated through the centred forms of
///   u_yy + sigma u_xx = 0   and   u_yyy + (2 - sigma) u_xxy = 0.
SparseOperator assemble_dy4(const Grid& grid, double sigma);

/// Discrete bilaplacian D_x^4 + D_y^4 + 2 D_x^2 D_y^2, block pentadiagonal
/// with block size J.
SparseOperator assemble_bilaplacian(const Grid& grid, double sigma);

/// Coefficients (c0, c1, c2) of a J x J block c0 I + c1 X + c2 X^2 where
/// X = D2 / dx^2, before the common 1/dy^4 factor.
using BlockPolynomial = std::array<double, 3>;

/// Free-edge blocks of D_y^4 at the bottom edge, as produced by ghost
/// elimination. rows[r][c] is the block multiplying U_c in level row r
/// (r = 0, 1; c = 0..3).
struct FreeEdgeBlocks {
  std::array<std::array<BlockPolynomial, 4>, 2> rows{};
};

FreeEdgeBlocks free_edge_blocks(const Grid& grid, double sigma);

/// One block of the reference D_y^4 boundary layout compared against the
/// derived block.
struct BlockComparison {
  int block_row = 0;
  int block_col = 0;
  BlockPolynomial derived{};
  BlockPolynomial printed{};
  bool matches = false;
  std::string note;
};

/// Compares the derived free-edge blocks with the reference boundary layout
/// (sigma_1 = dy^2 (2 sigma - 3 (2 - sigma)), sigma_2 = dy^2 (2 - sigma)),
/// block by block, for both edges. Mismatches are reported, not corrected.
std::vector<BlockComparison> free_edge_report(const Grid& grid, double sigma);

/// Validates 0 < sigma < 1/2; throws ParameterError otherwise.
void check_poisson_ratio(double sigma);

/// The constant operators used by the time stepper and the static solver.
struct SystemOperators {
  Grid grid;
  double sigma = 0.0;
  SparseOperator dx2;
  SparseOperator dy2;
  SparseOperator bilaplacian;
};

SystemOperators assemble_system(const Grid& grid, double sigma);

}  // namespace bergerdeck
