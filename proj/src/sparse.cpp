#include "bergerdeck/sparse.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <string>

#include "bergerdeck/errors.hpp"

namespace bergerdeck {

SparseOperator::SparseOperator(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

SparseOperator SparseOperator::from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets) {
  for (const auto& t : triplets)
    if (t.row >= rows || t.col >= cols) throw ShapeError("sparse: triplet index out of range");

  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  SparseOperator m(rows, cols);
  std::vector<std::size_t> counts(rows, 0);
  std::size_t i = 0;
  while (i < triplets.size()) {
    std::size_t r = triplets[i].row;
    std::size_t c = triplets[i].col;
    double v = 0.0;
    while (i < triplets.size() && triplets[i].row == r && triplets[i].col == c) v += triplets[i++].value;
    if (v != 0.0) {
      m.col_idx_.push_back(c);
      m.values_.push_back(v);
      ++counts[r];
    }
  }
  for (std::size_t r = 0; r < rows; ++r) m.row_ptr_[r + 1] = m.row_ptr_[r] + counts[r];
  return m;
}

SparseOperator SparseOperator::identity(std::size_t n) {
  std::vector<Triplet> t;
  t.reserve(n);
  for (std::size_t i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return from_triplets(n, n, std::move(t));
}

double SparseOperator::at(std::size_t i, std::size_t j) const {
  auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
  auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
  auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

void SparseOperator::apply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != cols_ || y.size() != rows_) throw ShapeError("sparse: apply dimension mismatch");
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) s += values_[p] * x[col_idx_[p]];
    y[i] = s;
  }
}

std::vector<double> SparseOperator::apply(std::span<const double> x) const {
  std::vector<double> y(rows_);
  apply(x, y);
  return y;
}

SparseOperator SparseOperator::transpose() const {
  std::vector<Triplet> t;
  t.reserve(nnz());
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) t.push_back({col_idx_[p], i, values_[p]});
  return from_triplets(cols_, rows_, std::move(t));
}

std::pair<std::size_t, std::size_t> SparseOperator::bandwidths() const {
  std::size_t lower = 0, upper = 0;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      std::size_t j = col_idx_[p];
      if (j < i) lower = std::max(lower, i - j);
      else upper = std::max(upper, j - i);
    }
  return {lower, upper};
}

std::size_t SparseOperator::max_row_nnz() const {
  std::size_t m = 0;
  for (std::size_t i = 0; i < rows_; ++i) m = std::max(m, row_ptr_[i + 1] - row_ptr_[i]);
  return m;
}

std::vector<std::vector<double>> SparseOperator::to_dense() const {
  std::vector<std::vector<double>> d(rows_, std::vector<double>(cols_, 0.0));
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) d[i][col_idx_[p]] = values_[p];
  return d;
}

void SparseOperator::dump_triplets(std::ostream& os) const {
  char buf[64];
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      std::snprintf(buf, sizeof buf, "%.17g", values_[p]);
      os << i << ' ' << col_idx_[p] << ' ' << buf << '\n';
    }
}

SparseOperator multiply(const SparseOperator& a, const SparseOperator& b) {
  if (a.cols() != b.rows()) throw ShapeError("sparse: multiply dimension mismatch");
  const auto arp = a.row_offsets();
  const auto aci = a.col_indices();
  const auto av = a.values();
  const auto brp = b.row_offsets();
  const auto bci = b.col_indices();
  const auto bv = b.values();

  std::vector<double> acc(b.cols(), 0.0);
  std::vector<char> used(b.cols(), 0);
  std::vector<std::size_t> pattern;
  std::vector<Triplet> out;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    pattern.clear();
    for (std::size_t p = arp[i]; p < arp[i + 1]; ++p) {
      const std::size_t k = aci[p];
      for (std::size_t q = brp[k]; q < brp[k + 1]; ++q) {
        const std::size_t j = bci[q];
        if (!used[j]) {
          used[j] = 1;
          pattern.push_back(j);
        }
        acc[j] += av[p] * bv[q];
      }
    }
    for (std::size_t j : pattern) {
      out.push_back({i, j, acc[j]});
      acc[j] = 0.0;
      used[j] = 0;
    }
  }
  return SparseOperator::from_triplets(a.rows(), b.cols(), std::move(out));
}

SparseOperator add(const SparseOperator& a, const SparseOperator& b, double alpha, double beta) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("sparse: add dimension mismatch");
  std::vector<Triplet> t;
  t.reserve(a.nnz() + b.nnz());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t p = a.row_offsets()[i]; p < a.row_offsets()[i + 1]; ++p)
      t.push_back({i, a.col_indices()[p], alpha * a.values()[p]});
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t p = b.row_offsets()[i]; p < b.row_offsets()[i + 1]; ++p)
      t.push_back({i, b.col_indices()[p], beta * b.values()[p]});
  return SparseOperator::from_triplets(a.rows(), a.cols(), std::move(t));
}

SparseOperator scale(const SparseOperator& a, double alpha) {
  std::vector<Triplet> t;
  t.reserve(a.nnz());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t p = a.row_offsets()[i]; p < a.row_offsets()[i + 1]; ++p)
      t.push_back({i, a.col_indices()[p], alpha * a.values()[p]});
  return SparseOperator::from_triplets(a.rows(), a.cols(), std::move(t));
}

SparseOperator block_diagonal(std::size_t copies, const SparseOperator& a) {
  std::vector<Triplet> t;
  t.reserve(copies * a.nnz());
  for (std::size_t c = 0; c < copies; ++c)
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t p = a.row_offsets()[i]; p < a.row_offsets()[i + 1]; ++p)
        t.push_back({c * a.rows() + i, c * a.cols() + a.col_indices()[p], a.values()[p]});
  return SparseOperator::from_triplets(copies * a.rows(), copies * a.cols(), std::move(t));
}

SparseOperator weighted_gram(const SparseOperator& a, std::span<const double> w, const SparseOperator& b) {
  if (a.rows() != b.rows() || w.size() != a.rows()) throw ShapeError("sparse: gram dimension mismatch");
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t q = b.row_offsets()[i]; q < b.row_offsets()[i + 1]; ++q)
      t.push_back({i, b.col_indices()[q], w[i] * b.values()[q]});
  SparseOperator wb = SparseOperator::from_triplets(b.rows(), b.cols(), std::move(t));
  return multiply(a.transpose(), wb);
}

}  // namespace bergerdeck
