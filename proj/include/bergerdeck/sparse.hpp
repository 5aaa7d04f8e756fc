#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace bergerdeck {

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Real sparse matrix in compressed-row layout. Column indices are strictly
/// increasing within a row and entries equal to 0.0 are never stored.
class SparseOperator {
 public:
  SparseOperator() = default;
  SparseOperator(std::size_t rows, std::size_t cols);

  /// Duplicates are summed in input order; exact zeros are dropped.
  static SparseOperator from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets);
  static SparseOperator identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  std::span<const std::size_t> row_offsets() const { return row_ptr_; }
  std::span<const std::size_t> col_indices() const { return col_idx_; }
  std::span<const double> values() const { return values_; }

  double at(std::size_t i, std::size_t j) const;

  void apply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> apply(std::span<const double> x) const;

  SparseOperator transpose() const;

  /// Largest |i - j| over stored entries, as (lower, upper).
  std::pair<std::size_t, std::size_t> bandwidths() const;
  std::size_t max_row_nnz() const;

  std::vector<std::vector<double>> to_dense() const;

  /// Coordinate dump, one "row col value" line per entry, 17 significant digits.
  void dump_triplets(std::ostream& os) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
};

/// C = A B. For each (i, j) the products a_ik b_kj are accumulated in
/// increasing k starting from 0.0.
SparseOperator multiply(const SparseOperator& a, const SparseOperator& b);

/// alpha A + beta B.
SparseOperator add(const SparseOperator& a, const SparseOperator& b, double alpha = 1.0, double beta = 1.0);

SparseOperator scale(const SparseOperator& a, double alpha);

/// I_m (x) A: m diagonal copies of A.
SparseOperator block_diagonal(std::size_t copies, const SparseOperator& a);

/// A^T diag(w) B.
SparseOperator weighted_gram(const SparseOperator& a, std::span<const double> w, const SparseOperator& b);

}  // namespace bergerdeck
