#include "bergerdeck/operators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bergerdeck/errors.hpp"

namespace bergerdeck {

namespace {

std::size_t uz(int v) { return static_cast<std::size_t>(v); }

// Adds `block` (J x J) at block position (bi, bj) of a level-blocked matrix.
void place_block(std::vector<Triplet>& out, const SparseOperator& block, int bi, int bj, std::size_t J) {
  const auto rp = block.row_offsets();
  const auto ci = block.col_indices();
  const auto v = block.values();
  for (std::size_t i = 0; i < block.rows(); ++i)
    for (std::size_t p = rp[i]; p < rp[i + 1]; ++p) out.push_back({uz(bi) * J + i, uz(bj) * J + ci[p], v[p]});
}

SparseOperator block_from_polynomial(const BlockPolynomial& c, const SparseOperator& x, const SparseOperator& x2,
                                     double factor) {
  const auto id = SparseOperator::identity(x.rows());
  SparseOperator b = add(add(id, x, c[0], c[1]), x2, 1.0, c[2]);
  return scale(b, factor);
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace

void check_poisson_ratio(double sigma) {
  if (!(sigma > 0.0 && sigma < 0.5))
    throw ParameterError("Poisson ratio sigma must lie in (0, 1/2), got " + std::to_string(sigma));
}

SparseOperator assemble_d2_1d(int n, double h) {
  if (n < 3) throw SizingError("d2: need n >= 3, got " + std::to_string(n));
  if (!(h > 0.0)) throw SizingError("d2: spacing must be > 0");
  const double s = 1.0 / (h * h);
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) {
    if (i > 0) t.push_back({uz(i), uz(i - 1), s});
    t.push_back({uz(i), uz(i), -2.0 * s});
    if (i + 1 < n) t.push_back({uz(i), uz(i + 1), s});
  }
  return SparseOperator::from_triplets(uz(n), uz(n), std::move(t));
}

SparseOperator assemble_d4_hinged_1d(int n, double h) {
  if (n < 5) throw SizingError("d4: need n >= 5, got " + std::to_string(n));
  if (!(h > 0.0)) throw SizingError("d4: spacing must be > 0");
  const double s = 1.0 / (h * h);
  auto d2 = [&](int i, int m) { return i == m ? -2.0 * s : s; };

  // Row i of the ghost-eliminated stencil: apply the second difference to the
  // second difference, the hinged ends contributing nothing.
  std::vector<Triplet> t;
  std::vector<double> acc(uz(n), 0.0);
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - 2), hi = std::min(n - 1, i + 2);
    for (int j = lo; j <= hi; ++j) acc[uz(j)] = 0.0;
    for (int m = std::max(0, i - 1); m <= std::min(n - 1, i + 1); ++m)
      for (int j = std::max(0, m - 1); j <= std::min(n - 1, m + 1); ++j) acc[uz(j)] += d2(i, m) * d2(m, j);
    for (int j = lo; j <= hi; ++j) t.push_back({uz(i), uz(j), acc[uz(j)]});
  }
  return SparseOperator::from_triplets(uz(n), uz(n), std::move(t));
}

SparseOperator assemble_dx2(const Grid& grid) {
  return block_diagonal(uz(grid.levels()), assemble_d2_1d(grid.J, grid.dx));
}

SparseOperator assemble_dx4(const Grid& grid) {
  return block_diagonal(uz(grid.levels()), assemble_d4_hinged_1d(grid.J, grid.dx));
}

SparseOperator assemble_dy2(const Grid& grid, double sigma) {
  check_poisson_ratio(sigma);
  const std::size_t J = uz(grid.J);
  const int top = grid.K + 1;
  const double s = 1.0 / (grid.dy * grid.dy);
  const SparseOperator x = assemble_d2_1d(grid.J, grid.dx);
  const SparseOperator edge = scale(x, -sigma);
  const SparseOperator id = SparseOperator::identity(J);

  std::vector<Triplet> t;
  place_block(t, edge, 0, 0, J);
  for (int k = 1; k < top; ++k) {
    place_block(t, scale(id, s), k, k - 1, J);
    place_block(t, scale(id, -2.0 * s), k, k, J);
    place_block(t, scale(id, s), k, k + 1, J);
  }
  place_block(t, edge, top, top, J);
  return SparseOperator::from_triplets(grid.n_dof(), grid.n_dof(), std::move(t));
}

FreeEdgeBlocks free_edge_blocks(const Grid& grid, double sigma) {
  // Ghost relations at k = 0 with a = sigma dy^2 X and b = (2 - sigma) dy^2 X:
  //   U_{-1} = (2I - a) U_0 - U_1
  //   U_{-2} = (4I - 2a - b(2I - a)) U_0 + (2b - 4I) U_1 + U_2
  // substituted into [1, -4, 6, -4, 1] at k = 0 and k = 1.
  const double al = sigma * grid.dy * grid.dy;
  const double be = (2.0 - sigma) * grid.dy * grid.dy;
  FreeEdgeBlocks f;
  f.rows[0][0] = {2.0, 2.0 * al - 2.0 * be, al * be};
  f.rows[0][1] = {-4.0, 2.0 * be, 0.0};
  f.rows[0][2] = {2.0, 0.0, 0.0};
  f.rows[0][3] = {0.0, 0.0, 0.0};
  f.rows[1][0] = {-2.0, -al, 0.0};
  f.rows[1][1] = {5.0, 0.0, 0.0};
  f.rows[1][2] = {-4.0, 0.0, 0.0};
  f.rows[1][3] = {1.0, 0.0, 0.0};
  return f;
}

SparseOperator assemble_dy4(const Grid& grid, double sigma) {
  check_poisson_ratio(sigma);
  const std::size_t J = uz(grid.J);
  const int top = grid.K + 1;
  const double s4 = 1.0 / (grid.dy * grid.dy * grid.dy * grid.dy);
  const SparseOperator x = assemble_d2_1d(grid.J, grid.dx);
  const SparseOperator x2 = multiply(x, x);
  const SparseOperator id = SparseOperator::identity(J);
  const FreeEdgeBlocks edge = free_edge_blocks(grid, sigma);

  std::vector<Triplet> t;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 4; ++c) {
      const auto& poly = edge.rows[uz(r)][uz(c)];
      if (poly == BlockPolynomial{0.0, 0.0, 0.0}) continue;
      const SparseOperator b = block_from_polynomial(poly, x, x2, s4);
      place_block(t, b, r, c, J);
      place_block(t, b, top - r, top - c, J);
    }
  static constexpr double stencil[5] = {1.0, -4.0, 6.0, -4.0, 1.0};
  for (int k = 2; k <= top - 2; ++k)
    for (int o = -2; o <= 2; ++o) place_block(t, scale(id, stencil[o + 2] * s4), k, k + o, J);
  return SparseOperator::from_triplets(grid.n_dof(), grid.n_dof(), std::move(t));
}

SparseOperator assemble_bilaplacian(const Grid& grid, double sigma) {
  const SparseOperator dx4 = assemble_dx4(grid);
  const SparseOperator dx2 = assemble_dx2(grid);
  const SparseOperator dy2 = assemble_dy2(grid, sigma);
  const SparseOperator dy4 = assemble_dy4(grid, sigma);
  return add(add(dx4, dy4), multiply(dx2, dy2), 1.0, 2.0);
}

std::vector<BlockComparison> free_edge_report(const Grid& grid, double sigma) {
  check_poisson_ratio(sigma);
  const double dy2 = grid.dy * grid.dy;
  const double dx2 = grid.dx * grid.dx;
  const double s1 = dy2 * (2.0 * sigma - 3.0 * (2.0 - sigma));
  const double s2 = dy2 * (2.0 - sigma);
  const FreeEdgeBlocks d = free_edge_blocks(grid, sigma);
  const int top = grid.K + 1;

  struct Printed {
    int r, c;
    BlockPolynomial p;
    const char* note;
  };
  // Published layout in X = D2/dx^2 terms; the top edge is listed with its
  // own (mirrored) offsets.
  const Printed bottom[] = {
      {0, 0, {2.0, s1, 0.0}, "2I + sigma_1/dx^2 D2"},
      {0, 1, {-4.0, 4.0 * s2, 0.0}, "-4I + 4 sigma_2/dx^2 D2"},
      {0, 2, {2.0, -s2, 0.0}, "2I - sigma_2/dx^2 D2"},
      {1, 0, {-2.0, -sigma * dy2, 0.0}, "-2I - sigma dy^2/dx^2 D2"},
      {1, 1, {5.0, 0.0, 0.0}, "5I"},
      {1, 2, {4.0, 0.0, 0.0}, "printed as the scalar 4"},
      {1, 3, {1.0, 0.0, 0.0}, "printed as the scalar 1"},
  };
  const Printed upper[] = {
      {0, 0, {2.0, s1 * dx2, 0.0}, "2I + sigma_1 D2 (no 1/dx^2)"},
      {0, 1, {-4.0, 4.0 * s2, 0.0}, "-4I + 4 sigma_2/dx^2 D2"},
      {0, 2, {2.0, -s2, 0.0}, "2I - sigma_2/dx^2 D2"},
      {1, 0, {-2.0, -sigma * dy2, 0.0}, "-2I - sigma dy^2/dx^2 D2"},
      {1, 1, {5.0, 0.0, 0.0}, "5I"},
      {1, 2, {-4.0, 0.0, 0.0}, "-4I"},
      {1, 3, {1.0, 0.0, 0.0}, "I"},
  };

  std::vector<BlockComparison> out;
  auto compare = [&](const Printed& p, bool at_top) {
    BlockComparison c;
    c.block_row = at_top ? top - p.r : p.r;
    c.block_col = at_top ? top - p.c : p.c;
    c.derived = d.rows[uz(p.r)][uz(p.c)];
    c.printed = p.p;
    c.matches = close(c.derived[0], c.printed[0]) && close(c.derived[1], c.printed[1]) &&
                close(c.derived[2], c.printed[2]);
    c.note = p.note;
    out.push_back(c);
  };
  for (const auto& p : bottom) compare(p, false);
  for (const auto& p : upper) compare(p, true);
  return out;
}

SystemOperators assemble_system(const Grid& grid, double sigma) {
  SystemOperators ops;
  ops.grid = grid;
  ops.sigma = sigma;
  ops.dx2 = assemble_dx2(grid);
  ops.dy2 = assemble_dy2(grid, sigma);
  ops.bilaplacian = add(add(assemble_dx4(grid), assemble_dy4(grid, sigma)), multiply(ops.dx2, ops.dy2), 1.0, 2.0);
  return ops;
}

}  // namespace bergerdeck
