#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bergerdeck/sparse.hpp"

namespace bergerdeck {

/// LU factorization with partial pivoting of a banded square matrix, stored in
/// the LAPACK general-band layout (dgbtrf / dgbtrs).
///
/// The factor is immutable after construction; solve() is const and may be
/// called concurrently from several threads.
class BandedLU {
 public:
  /// Throws SolveError when the matrix is singular (zero pivot), reporting the
  /// pivot index in the message.
  explicit BandedLU(const SparseOperator& a);

  std::size_t size() const { return n_; }
  int lower_bandwidth() const { return kl_; }
  int upper_bandwidth() const { return ku_; }

  void solve_in_place(std::span<double> b) const;
  std::vector<double> solve(std::span<const double> b) const;

  /// Estimate of the reciprocal 1-norm condition number (dgbcon).
  double rcond() const { return rcond_; }

 private:
  std::size_t n_ = 0;
  int kl_ = 0;
  int ku_ = 0;
  int ldab_ = 0;
  std::vector<double> ab_;
  std::vector<int> ipiv_;
  double rcond_ = 0.0;
};

/// Direct solve of A x = b followed by iterative refinement until the chosen
/// residual measure meets `tolerance`.
///
///  - RelativeResidual: |A x - b| / |b|.
///  - BackwardError: |A x - b| / (|A|_inf |x| + |b|) in the infinity norm.
///    The relative residual of a rounded solution cannot drop below roughly
///    eps |A| |x| / |b|, which for stiff operators exceeds 1e-10.
enum class ResidualMeasure { RelativeResidual, BackwardError };

struct SolveReport {
  std::vector<double> x;
  double relative_residual = 0.0;
  double backward_error = 0.0;
  int refinements = 0;
};

class FactorizedMatrix {
 public:
  explicit FactorizedMatrix(SparseOperator a, double tolerance = 1e-10, int max_refinements = 3,
                            ResidualMeasure measure = ResidualMeasure::RelativeResidual);

  /// Throws SolveError carrying the achieved residual if the tolerance is not
  /// reached.
  SolveReport solve(std::span<const double> b) const;

  const SparseOperator& matrix() const { return a_; }
  const BandedLU& factor() const { return lu_; }
  double tolerance() const { return tol_; }
  ResidualMeasure measure() const { return measure_; }

 private:
  SparseOperator a_;
  BandedLU lu_;
  double tol_;
  int max_refinements_;
  ResidualMeasure measure_;
  double anorm_inf_ = 0.0;
};

double norm2(std::span<const double> v);

}  // namespace bergerdeck
