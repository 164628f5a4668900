#pragma once

// Value-semantic containers shared by every module: a row-major dense matrix
// of doubles, a sorted sparse vector, and a sparse coefficient matrix stored
// as per-column buckets with a hard entry budget.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "gdl/errors.hpp"

namespace gdl {

class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), v_(rows * cols, 0.0) {}

  // Row-major values; rejects NaN/Inf.
  static DenseMatrix from_values(std::size_t rows, std::size_t cols,
                                 std::vector<double> values) {
    if (values.size() != rows * cols)
      throw DimensionMismatch("from_values: " + std::to_string(values.size()) +
                              " values for " + std::to_string(rows) + "x" +
                              std::to_string(cols));
    for (double x : values)
      if (!std::isfinite(x))
        throw InvalidArgument("from_values: non-finite entry");
    DenseMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.v_ = std::move(values);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double operator()(std::size_t r, std::size_t c) const {
    return v_[r * cols_ + c];
  }
  double& operator()(std::size_t r, std::size_t c) { return v_[r * cols_ + c]; }

  const double* data() const { return v_.data(); }
  double* data() { return v_.data(); }
  const double* row_ptr(std::size_t r) const { return v_.data() + r * cols_; }
  double* row_ptr(std::size_t r) { return v_.data() + r * cols_; }

  std::vector<double> column(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = v_[r * cols_ + c];
    return out;
  }

  void set_column(std::size_t c, const std::vector<double>& col) {
    if (col.size() != rows_)
      throw DimensionMismatch("set_column: length " +
                              std::to_string(col.size()) + " vs " +
                              std::to_string(rows_) + " rows");
    for (std::size_t r = 0; r < rows_; ++r) v_[r * cols_ + c] = col[r];
  }

  double column_norm_sq(std::size_t c) const {
    double s = 0.0;
    for (std::size_t r = 0; r < rows_; ++r) {
      const double x = v_[r * cols_ + c];
      s += x * x;
    }
    return s;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> v_;
};

inline double frobenius_norm_sq(const DenseMatrix& m) {
  double s = 0.0;
  const double* p = m.data();
  const std::size_t total = m.rows() * m.cols();
  for (std::size_t i = 0; i < total; ++i) s += p[i] * p[i];
  return s;
}

// Unit l2 columns; throws ZeroColumn on a column with norm < 1e-12.
inline DenseMatrix normalize_columns(DenseMatrix m) {
  for (std::size_t c = 0; c < m.cols(); ++c) {
    const double norm = std::sqrt(m.column_norm_sq(c));
    if (norm < 1e-12) throw ZeroColumn(c);
    for (std::size_t r = 0; r < m.rows(); ++r) m(r, c) /= norm;
  }
  return m;
}

inline DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows())
    throw DimensionMismatch("matmul: " + std::to_string(a.cols()) + " vs " +
                            std::to_string(b.rows()));
  DenseMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* brow = b.row_ptr(k);
      double* orow = out.row_ptr(i);
      for (std::size_t j = 0; j < b.cols(); ++j) orow[j] += aik * brow[j];
    }
  return out;
}

inline DenseMatrix transpose(const DenseMatrix& m) {
  DenseMatrix out(m.cols(), m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out(c, r) = m(r, c);
  return out;
}

// Sparse vector with strictly increasing indices and nonzero finite values.
class SparseVector {
 public:
  using Entry = std::pair<std::size_t, double>;

  explicit SparseVector(std::size_t dim = 0) : dim_(dim) {}

  // Entries need not arrive sorted; they are sorted here. Zero values are
  // rejected, duplicates and out-of-range indices throw.
  static SparseVector from_entries(std::size_t dim, std::vector<Entry> entries) {
    std::sort(entries.begin(), entries.end());
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto& [idx, val] = entries[i];
      if (idx >= dim)
        throw DimensionMismatch("sparse entry index " + std::to_string(idx) +
                                " out of range " + std::to_string(dim));
      if (i > 0 && entries[i - 1].first == idx)
        throw InvalidArgument("duplicate sparse index " + std::to_string(idx));
      if (!std::isfinite(val)) throw InvalidArgument("non-finite sparse value");
      if (val == 0.0) throw InvalidArgument("explicit zero sparse value");
    }
    SparseVector v(dim);
    v.entries_ = std::move(entries);
    return v;
  }

  // Same as from_entries but silently drops exact zeros (handy for results of
  // least-squares fits).
  static SparseVector from_entries_drop_zeros(std::size_t dim,
                                              std::vector<Entry> entries) {
    std::vector<Entry> kept;
    kept.reserve(entries.size());
    for (const auto& e : entries)
      if (e.second != 0.0) kept.push_back(e);
    return from_entries(dim, std::move(kept));
  }

  std::size_t dim() const { return dim_; }
  std::size_t nnz() const { return entries_.size(); }
  const std::vector<Entry>& entries() const { return entries_; }

  std::vector<double> to_dense() const {
    std::vector<double> out(dim_, 0.0);
    for (const auto& [idx, val] : entries_) out[idx] = val;
    return out;
  }

  double norm_sq() const {
    double s = 0.0;
    for (const auto& [idx, val] : entries_) s += val * val;
    return s;
  }

 private:
  std::size_t dim_;
  std::vector<Entry> entries_;
};

// m x n coefficient matrix with at most `budget` stored nonzeros, kept as
// per-column lists sorted by row.
class SparseCoeffMatrix {
 public:
  using Entry = std::pair<std::size_t, double>;  // (row, value)

  SparseCoeffMatrix(std::size_t rows, std::size_t cols, std::size_t budget)
      : rows_(rows), cols_(cols), budget_(budget), buckets_(cols) {}

  static SparseCoeffMatrix from_triplets(
      std::size_t rows, std::size_t cols, std::size_t budget,
      const std::vector<std::tuple<std::size_t, std::size_t, double>>& trips) {
    SparseCoeffMatrix a(rows, cols, budget);
    std::vector<std::vector<Entry>> buckets(cols);
    for (const auto& [r, c, v] : trips) {
      if (r >= rows || c >= cols)
        throw DimensionMismatch("triplet (" + std::to_string(r) + "," +
                                std::to_string(c) + ") out of range");
      if (!std::isfinite(v)) throw InvalidArgument("non-finite triplet value");
      if (v == 0.0) throw InvalidArgument("explicit zero triplet value");
      buckets[c].emplace_back(r, v);
    }
    std::size_t nnz = 0;
    for (std::size_t c = 0; c < cols; ++c) {
      auto& b = buckets[c];
      std::sort(b.begin(), b.end());
      for (std::size_t i = 1; i < b.size(); ++i)
        if (b[i - 1].first == b[i].first)
          throw InvalidArgument("duplicate triplet at (" +
                                std::to_string(b[i].first) + "," +
                                std::to_string(c) + ")");
      nnz += b.size();
    }
    if (nnz > budget)
      throw BudgetTooLarge("triplets hold " + std::to_string(nnz) +
                           " nonzeros, budget " + std::to_string(budget));
    a.buckets_ = std::move(buckets);
    a.nnz_ = nnz;
    return a;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t budget() const { return budget_; }
  std::size_t nnz() const { return nnz_; }

  const std::vector<Entry>& column(std::size_t c) const { return buckets_[c]; }

  std::size_t column_nnz(std::size_t c) const { return buckets_[c].size(); }

  void set_column(std::size_t c, const SparseVector& v) {
    if (v.dim() != rows_)
      throw DimensionMismatch("set_column: dim " + std::to_string(v.dim()) +
                              " vs " + std::to_string(rows_) + " rows");
    const std::size_t next = nnz_ - buckets_[c].size() + v.nnz();
    if (next > budget_)
      throw BudgetTooLarge("set_column would hold " + std::to_string(next) +
                           " nonzeros, budget " + std::to_string(budget_));
    buckets_[c].assign(v.entries().begin(), v.entries().end());
    nnz_ = next;
  }

  // Row i across all columns, as (col, value) pairs in column order.
  std::vector<Entry> row_snapshot(std::size_t r) const {
    std::vector<Entry> out;
    for (std::size_t c = 0; c < cols_; ++c) {
      const auto& b = buckets_[c];
      auto it = std::lower_bound(b.begin(), b.end(), r,
                                 [](const Entry& e, std::size_t row) {
                                   return e.first < row;
                                 });
      if (it != b.end() && it->first == r) out.emplace_back(c, it->second);
    }
    return out;
  }

  // Replaces row r with the given (col, value) pairs.
  void set_row(std::size_t r, const std::vector<Entry>& entries) {
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (entries[i].first >= cols_)
        throw DimensionMismatch("set_row: column out of range");
      if (i > 0 && entries[i - 1].first >= entries[i].first)
        throw InvalidArgument("set_row: entries must be sorted by column");
      if (entries[i].second == 0.0 || !std::isfinite(entries[i].second))
        throw InvalidArgument("set_row: zero or non-finite value");
    }
    std::size_t removed = 0;
    for (std::size_t c = 0; c < cols_; ++c) {
      auto& b = buckets_[c];
      auto it = std::lower_bound(b.begin(), b.end(), r,
                                 [](const Entry& e, std::size_t row) {
                                   return e.first < row;
                                 });
      if (it != b.end() && it->first == r) {
        b.erase(it);
        ++removed;
      }
    }
    const std::size_t next = nnz_ - removed + entries.size();
    if (next > budget_)
      throw BudgetTooLarge("set_row would hold " + std::to_string(next) +
                           " nonzeros, budget " + std::to_string(budget_));
    for (const auto& [c, v] : entries) {
      auto& b = buckets_[c];
      auto it = std::lower_bound(b.begin(), b.end(), r,
                                 [](const Entry& e, std::size_t row) {
                                   return e.first < row;
                                 });
      b.insert(it, {r, v});
    }
    nnz_ = next;
  }

  // Multiplies every entry of row r by a nonzero finite factor. Counts are
  // unchanged, so this never touches the budget.
  void scale_row(std::size_t r, double factor) {
    if (!std::isfinite(factor) || factor == 0.0)
      throw InvalidArgument("scale_row: factor must be finite and nonzero");
    for (auto& b : buckets_)
      for (auto& [row, v] : b)
        if (row == r) v *= factor;
  }

  std::vector<std::size_t> nnz_per_column() const {
    std::vector<std::size_t> out(cols_);
    for (std::size_t c = 0; c < cols_; ++c) out[c] = buckets_[c].size();
    return out;
  }

  std::vector<std::size_t> nnz_per_row() const {
    std::vector<std::size_t> out(rows_, 0);
    for (const auto& b : buckets_)
      for (const auto& [r, v] : b) ++out[r];
    return out;
  }

  // Bookkeeping identity: per-column counts and per-row counts both sum to
  // the stored nnz. Throws on violation.
  void validate_counts() const {
    std::size_t col_sum = 0;
    for (const auto& b : buckets_) col_sum += b.size();
    std::size_t row_sum = 0;
    for (std::size_t r : nnz_per_row()) row_sum += r;
    if (col_sum != nnz_ || row_sum != nnz_)
      throw InvalidArgument("sparse count bookkeeping violated: cols " +
                            std::to_string(col_sum) + ", rows " +
                            std::to_string(row_sum) + ", nnz " +
                            std::to_string(nnz_));
    if (nnz_ > budget_)
      throw BudgetTooLarge("nnz " + std::to_string(nnz_) + " over budget " +
                           std::to_string(budget_));
  }

  DenseMatrix to_dense() const {
    DenseMatrix out(rows_, cols_);
    for (std::size_t c = 0; c < cols_; ++c)
      for (const auto& [r, v] : buckets_[c]) out(r, c) = v;
    return out;
  }

  static SparseCoeffMatrix from_dense(const DenseMatrix& m, std::size_t budget) {
    SparseCoeffMatrix a(m.rows(), m.cols(), budget);
    std::size_t nnz = 0;
    for (std::size_t c = 0; c < m.cols(); ++c) {
      auto& b = a.buckets_[c];
      for (std::size_t r = 0; r < m.rows(); ++r)
        if (m(r, c) != 0.0) b.emplace_back(r, m(r, c));
      nnz += b.size();
    }
    if (nnz > budget)
      throw BudgetTooLarge("dense matrix holds " + std::to_string(nnz) +
                           " nonzeros, budget " + std::to_string(budget));
    a.nnz_ = nnz;
    return a;
  }

 private:
  std::size_t rows_, cols_, budget_;
  std::size_t nnz_ = 0;
  std::vector<std::vector<Entry>> buckets_;
};

}  // namespace gdl
