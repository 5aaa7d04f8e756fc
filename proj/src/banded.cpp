#include "bergerdeck/banded.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "bergerdeck/errors.hpp"

extern "C" {
void dgbtrf_(const int* m, const int* n, const int* kl, const int* ku, double* ab, const int* ldab, int* ipiv,
             int* info);
void dgbtrs_(const char* trans, const int* n, const int* kl, const int* ku, const int* nrhs, const double* ab,
             const int* ldab, const int* ipiv, double* b, const int* ldb, int* info);
void dgbcon_(const char* norm, const int* n, const int* kl, const int* ku, const double* ab, const int* ldab,
             const int* ipiv, const double* anorm, double* rcond, double* work, int* iwork, int* info);
}

namespace bergerdeck {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

BandedLU::BandedLU(const SparseOperator& a) : n_(a.rows()) {
  if (a.rows() != a.cols()) throw ShapeError("banded: matrix must be square");
  const auto [lower, upper] = a.bandwidths();
  kl_ = static_cast<int>(lower);
  ku_ = static_cast<int>(upper);
  ldab_ = 2 * kl_ + ku_ + 1;
  ab_.assign(static_cast<std::size_t>(ldab_) * n_, 0.0);
  ipiv_.assign(n_, 0);

  // 1-norm of A for the condition estimate.
  std::vector<double> colsum(n_, 0.0);
  const auto rp = a.row_offsets();
  const auto ci = a.col_indices();
  const auto v = a.values();
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t p = rp[i]; p < rp[i + 1]; ++p) {
      const std::size_t j = ci[p];
      ab_[static_cast<std::size_t>(kl_ + ku_) + i - j + j * static_cast<std::size_t>(ldab_)] = v[p];
      colsum[j] += std::abs(v[p]);
    }
  double anorm = 0.0;
  for (double c : colsum) anorm = std::max(anorm, c);

  const int n = static_cast<int>(n_);
  int info = 0;
  dgbtrf_(&n, &n, &kl_, &ku_, ab_.data(), &ldab_, ipiv_.data(), &info);
  if (info > 0) throw SolveError("banded: exactly singular, zero pivot at " + std::to_string(info), INFINITY);
  if (info < 0) throw SolveError("banded: dgbtrf argument error " + std::to_string(-info), INFINITY);

  std::vector<double> work(3 * n_);
  std::vector<int> iwork(n_);
  const char norm = '1';
  dgbcon_(&norm, &n, &kl_, &ku_, ab_.data(), &ldab_, ipiv_.data(), &anorm, &rcond_, work.data(), iwork.data(),
          &info);
}

void BandedLU::solve_in_place(std::span<double> b) const {
  if (b.size() != n_) throw ShapeError("banded: right-hand side length mismatch");
  const int n = static_cast<int>(n_);
  const int nrhs = 1;
  const char trans = 'N';
  int info = 0;
  dgbtrs_(&trans, &n, &kl_, &ku_, &nrhs, ab_.data(), &ldab_, ipiv_.data(), b.data(), &n, &info);
  if (info != 0) throw SolveError("banded: dgbtrs failed with info " + std::to_string(info), INFINITY);
}

std::vector<double> BandedLU::solve(std::span<const double> b) const {
  std::vector<double> x(b.begin(), b.end());
  solve_in_place(x);
  return x;
}

namespace {

// r = b - A x, accumulated in extended precision so that refinement can push
// the residual below the working-precision rounding of A x.
void residual(const SparseOperator& a, std::span<const double> x, std::span<const double> b, std::span<double> r) {
  const auto rp = a.row_offsets();
  const auto ci = a.col_indices();
  const auto v = a.values();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    long double s = b[i];
    for (std::size_t p = rp[i]; p < rp[i + 1]; ++p)
      s -= static_cast<long double>(v[p]) * static_cast<long double>(x[ci[p]]);
    r[i] = static_cast<double>(s);
  }
}

double norm_inf(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

FactorizedMatrix::FactorizedMatrix(SparseOperator a, double tolerance, int max_refinements, ResidualMeasure measure)
    : a_(std::move(a)), lu_(a_), tol_(tolerance), max_refinements_(max_refinements), measure_(measure) {
  const auto rp = a_.row_offsets();
  const auto v = a_.values();
  for (std::size_t i = 0; i < a_.rows(); ++i) {
    double s = 0.0;
    for (std::size_t p = rp[i]; p < rp[i + 1]; ++p) s += std::abs(v[p]);
    anorm_inf_ = std::max(anorm_inf_, s);
  }
}

SolveReport FactorizedMatrix::solve(std::span<const double> b) const {
  SolveReport rep;
  rep.x = lu_.solve(b);
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    rep.relative_residual = norm2(rep.x) == 0.0 ? 0.0 : INFINITY;
    if (rep.relative_residual != 0.0) throw SolveError("solve: nonzero solution for zero right-hand side", INFINITY);
    return rep;
  }
  std::vector<double> r(b.size());
  for (;;) {
    residual(a_, rep.x, b, r);
    rep.relative_residual = norm2(r) / bnorm;
    rep.backward_error = norm_inf(r) / (anorm_inf_ * norm_inf(rep.x) + norm_inf(b));
    if (!std::isfinite(rep.relative_residual))
      throw SolveError("solve: non-finite residual", rep.relative_residual);
    const double achieved =
        measure_ == ResidualMeasure::RelativeResidual ? rep.relative_residual : rep.backward_error;
    if (achieved <= tol_) return rep;
    if (rep.refinements == max_refinements_) break;
    lu_.solve_in_place(r);
    for (std::size_t i = 0; i < r.size(); ++i) rep.x[i] += r[i];
    ++rep.refinements;
  }
  const bool rel = measure_ == ResidualMeasure::RelativeResidual;
  const double achieved = rel ? rep.relative_residual : rep.backward_error;
  char buf[200];
  std::snprintf(buf, sizeof buf, "solve: %s %.3g above tolerance %.3g after %d refinements (rcond %.3g)",
                rel ? "relative residual" : "backward error", achieved, tol_, rep.refinements, lu_.rcond());
  throw SolveError(buf, achieved);
}

}  // namespace bergerdeck
