#pragma once

// Per-signal k-sparse coding: orthogonal matching pursuit, the brute-force
// support-enumeration oracle it is tested against, and batch coding over the
// columns of a signal matrix.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "gdl/detail/linalg.hpp"
#include "gdl/errors.hpp"
#include "gdl/matrix.hpp"

namespace gdl {

struct OmpConfig {
  // Early-stop threshold, relative to ||x||2: stop once ||r||2 <= tol * ||x||2.
  double residual_tol = 1e-12;
  // Hard cap on selected atoms, applied on top of the per-call budget k.
  std::size_t max_atoms = std::numeric_limits<std::size_t>::max();
  // After the greedy pass, try exchanging each selected atom for the best
  // outside atom while the residual strictly improves. Repairs greedy
  // mistakes on coherent dictionaries; support size is unchanged.
  bool swap_refine = false;
};

namespace detail {

inline void require_unit_columns(const DenseMatrix& d_mat) {
  for (std::size_t c = 0; c < d_mat.cols(); ++c) {
    const double norm = std::sqrt(d_mat.column_norm_sq(c));
    if (std::abs(norm - 1.0) > 1e-8)
      throw NonUnitDictionary("dictionary column " + std::to_string(c) +
                              " has norm " + std::to_string(norm));
  }
}

struct OmpResult {
  std::vector<std::size_t> support;  // selection order
  std::vector<double> coeffs;        // aligned with support
  double residual_sq = 0.0;
};

// Core greedy loop; assumes dimensions and unit columns already verified.
inline OmpResult omp_core(const DenseMatrix& d_mat, const double* x,
                          std::size_t k, const OmpConfig& cfg) {
  const std::size_t d = d_mat.rows();
  const std::size_t m = d_mat.cols();
  const std::size_t budget = std::min({k, cfg.max_atoms, m});

  OmpResult out;
  double x_norm_sq = 0.0;
  for (std::size_t r = 0; r < d; ++r) x_norm_sq += x[r] * x[r];
  const double stop_norm = cfg.residual_tol * std::sqrt(x_norm_sq);

  std::vector<double> residual(x, x + d);
  std::vector<char> selected(m, 0);
  out.residual_sq = x_norm_sq;

  while (out.support.size() < budget) {
    if (std::sqrt(out.residual_sq) <= stop_norm) break;
    // Largest |correlation| among unselected atoms; ties keep the smallest
    // index because the scan is ascending with a strict comparison.
    double best = 0.0;
    std::size_t best_j = m;
    for (std::size_t j = 0; j < m; ++j) {
      if (selected[j]) continue;
      double corr = 0.0;
      for (std::size_t r = 0; r < d; ++r) corr += d_mat(r, j) * residual[r];
      const double mag = std::abs(corr);
      if (mag > best) {
        best = mag;
        best_j = j;
      }
    }
    if (best_j == m || best == 0.0) break;  // nothing left to explain
    selected[best_j] = 1;
    out.support.push_back(best_j);
    out.coeffs = least_squares_on_support(d_mat, x, out.support,
                                          &out.residual_sq);
    for (std::size_t r = 0; r < d; ++r) {
      double e = x[r];
      for (std::size_t a = 0; a < out.support.size(); ++a)
        e -= out.coeffs[a] * d_mat(r, out.support[a]);
      residual[r] = e;
    }
  }

  if (cfg.swap_refine && out.support.size() > 1 &&
      std::sqrt(out.residual_sq) > stop_norm) {
    // Exchange step: drop one selected atom, refit, pick the atom most
    // correlated with what remains, refit again. Kept only when strictly
    // better, so the loop terminates and the result never regresses.
    bool improved = true;
    std::vector<std::size_t> trial;
    for (std::size_t pass = 0; improved && pass < 3; ++pass) {
      improved = false;
      for (std::size_t s = 0; s < out.support.size(); ++s) {
        trial = out.support;
        trial.erase(trial.begin() + s);
        double partial_sq = 0.0;
        const auto partial =
            least_squares_on_support(d_mat, x, trial, &partial_sq);
        for (std::size_t r = 0; r < d; ++r) {
          double e = x[r];
          for (std::size_t a = 0; a < trial.size(); ++a)
            e -= partial[a] * d_mat(r, trial[a]);
          residual[r] = e;
        }
        double best = 0.0;
        std::size_t best_j = m;
        for (std::size_t j = 0; j < m; ++j) {
          if (selected[j] && j != out.support[s]) continue;
          double corr = 0.0;
          for (std::size_t r = 0; r < d; ++r) corr += d_mat(r, j) * residual[r];
          const double mag = std::abs(corr);
          if (mag > best) {
            best = mag;
            best_j = j;
          }
        }
        if (best_j == m || best_j == out.support[s]) continue;
        trial.push_back(best_j);
        double trial_sq = 0.0;
        const auto coeffs = least_squares_on_support(d_mat, x, trial, &trial_sq);
        if (trial_sq < out.residual_sq) {
          selected[out.support[s]] = 0;
          selected[best_j] = 1;
          out.support = trial;
          out.coeffs = coeffs;
          out.residual_sq = trial_sq;
          improved = true;
        }
      }
    }
  }
  return out;
}

inline SparseVector omp_result_to_sparse(const OmpResult& res, std::size_t m) {
  std::vector<SparseVector::Entry> entries;
  entries.reserve(res.support.size());
  for (std::size_t a = 0; a < res.support.size(); ++a)
    entries.emplace_back(res.support[a], res.coeffs[a]);
  return SparseVector::from_entries_drop_zeros(m, std::move(entries));
}

}  // namespace detail

// OMP: greedily selects up to k atoms by largest absolute correlation with
// the running residual, re-fitting by least squares after every selection.
inline SparseVector omp(const DenseMatrix& d_mat, const std::vector<double>& x,
                        std::size_t k, const OmpConfig& cfg = {}) {
  if (x.size() != d_mat.rows())
    throw DimensionMismatch("omp: signal length " + std::to_string(x.size()) +
                            " vs " + std::to_string(d_mat.rows()) + " rows");
  detail::require_unit_columns(d_mat);
  return detail::omp_result_to_sparse(
      detail::omp_core(d_mat, x.data(), k, cfg), d_mat.cols());
}

// Exhaustive search over every support of size <= k, least squares on each,
// smallest objective wins; exact ties go to the lexicographically smallest
// support. Refuses instances where the enumeration would exceed 1e6 supports.
inline SparseVector exact_sparse_oracle(const DenseMatrix& d_mat,
                                        const std::vector<double>& x,
                                        std::size_t k) {
  const std::size_t m = d_mat.cols();
  if (x.size() != d_mat.rows())
    throw DimensionMismatch("oracle: signal length mismatch");
  const std::size_t kk = std::min(k, m);
  double total = 0.0;
  {
    double c = 1.0;
    for (std::size_t j = 1; j <= kk; ++j) {
      c = c * static_cast<double>(m - j + 1) / static_cast<double>(j);
      total += c;
      if (total > 1e6)
        throw TooLarge("oracle: more than 1e6 supports to enumerate");
    }
  }

  double best_obj = 0.0;
  for (double xi : x) best_obj += xi * xi;  // empty support
  std::vector<std::size_t> best_support;

  std::vector<std::size_t> support;
  for (std::size_t size = 1; size <= kk; ++size) {
    support.assign(size, 0);
    for (std::size_t i = 0; i < size; ++i) support[i] = i;
    for (;;) {
      double obj = 0.0;
      detail::least_squares_mgs(d_mat, x.data(), support, &obj);
      if (obj < best_obj ||
          (obj == best_obj &&
           std::lexicographical_compare(support.begin(), support.end(),
                                        best_support.begin(),
                                        best_support.end()))) {
        best_obj = obj;
        best_support = support;
      }
      // next combination in lexicographic order
      std::size_t i = size;
      while (i > 0 && support[i - 1] == m - size + (i - 1)) --i;
      if (i == 0) break;
      ++support[i - 1];
      for (std::size_t j = i; j < size; ++j) support[j] = support[j - 1] + 1;
    }
  }

  std::vector<SparseVector::Entry> entries;
  if (!best_support.empty()) {
    const auto coeffs =
        detail::least_squares_mgs(d_mat, x.data(), best_support, nullptr);
    for (std::size_t a = 0; a < best_support.size(); ++a)
      entries.emplace_back(best_support[a], coeffs[a]);
  }
  return SparseVector::from_entries_drop_zeros(m, std::move(entries));
}

// Codes every column of X with its own OMP budget. Pure batch OMP; the
// learner layers its acceptance rule on top of this.
inline SparseCoeffMatrix column_stage_code(const DenseMatrix& d_mat,
                                           const DenseMatrix& x_mat,
                                           const std::vector<std::size_t>& budgets,
                                           const OmpConfig& cfg = {}) {
  if (x_mat.rows() != d_mat.rows())
    throw DimensionMismatch("column_stage_code: row mismatch");
  if (budgets.size() != x_mat.cols())
    throw DimensionMismatch("column_stage_code: one budget per column");
  detail::require_unit_columns(d_mat);
  std::size_t total = 0;
  for (std::size_t b : budgets) total += b;
  SparseCoeffMatrix a(d_mat.cols(), x_mat.cols(), total);
  std::vector<double> x(d_mat.rows());
  for (std::size_t c = 0; c < x_mat.cols(); ++c) {
    if (budgets[c] == 0) continue;
    for (std::size_t r = 0; r < x_mat.rows(); ++r) x[r] = x_mat(r, c);
    const auto res = detail::omp_core(d_mat, x.data(), budgets[c], cfg);
    a.set_column(c, detail::omp_result_to_sparse(res, d_mat.cols()));
  }
  return a;
}

namespace detail {

// Re-codes the columns of X, keeping for each column the best of: the fresh
// OMP solution, a least-squares re-fit of the previous support, and the
// previous values. The result never has a larger per-column residual than
// the previous coefficients, which is what makes the calling stage monotone.
inline void code_columns_with_acceptance(const DenseMatrix& d_mat,
                                         const DenseMatrix& x_mat,
                                         const std::vector<std::size_t>& budgets,
                                         SparseCoeffMatrix& a,
                                         const OmpConfig& cfg) {
  const std::size_t d = d_mat.rows();
  const std::size_t m = d_mat.cols();
  std::vector<double> x(d);
  for (std::size_t c = 0; c < x_mat.cols(); ++c) {
    for (std::size_t r = 0; r < d; ++r) x[r] = x_mat(r, c);
    const auto& prev = a.column(c);

    double prev_res = 0.0;
    for (std::size_t r = 0; r < d; ++r) {
      double e = x[r];
      for (const auto& [row, val] : prev) e -= val * d_mat(r, row);
      prev_res += e * e;
    }
    if (budgets[c] == 0 && prev.empty()) continue;

    const OmpResult fresh = omp_core(d_mat, x.data(), budgets[c], cfg);

    std::vector<std::size_t> prev_support;
    prev_support.reserve(prev.size());
    for (const auto& [row, val] : prev) prev_support.push_back(row);
    double refit_res = 0.0;
    const auto refit_coeffs =
        least_squares_on_support(d_mat, x.data(), prev_support, &refit_res);

    if (fresh.residual_sq <= refit_res && fresh.residual_sq <= prev_res) {
      a.set_column(c, omp_result_to_sparse(fresh, m));
    } else if (refit_res <= prev_res) {
      std::vector<SparseVector::Entry> entries;
      for (std::size_t i = 0; i < prev_support.size(); ++i)
        entries.emplace_back(prev_support[i], refit_coeffs[i]);
      a.set_column(c,
                   SparseVector::from_entries_drop_zeros(m, std::move(entries)));
    }
    // else: previous values stay.
  }
}

// Hands unused capacity to the columns that need it most. A coding pass can
// use less than its per-column capacities (the pursuit stops once a residual
// is numerically zero), and counts otherwise only shrink, so without this
// the global budget leaks monotonically. One atom moves per step, to the
// open column with the largest residual; an extension is kept only when the
// support actually grows and the residual strictly drops, so the objective
// never increases and the loop terminates.
inline void redistribute_column_surplus(const DenseMatrix& d_mat,
                                        const DenseMatrix& x_mat,
                                        std::size_t surplus,
                                        SparseCoeffMatrix& a,
                                        const OmpConfig& cfg) {
  const std::size_t d = d_mat.rows();
  const std::size_t m = d_mat.cols();
  const std::size_t n = x_mat.cols();
  const std::size_t cap = std::min(d, m);  // larger supports cannot help

  std::vector<double> res(n, 0.0);
  std::vector<char> open(n, 1);
  std::vector<double> x(d);
  for (std::size_t c = 0; c < n; ++c) {
    const auto& col = a.column(c);
    for (std::size_t r = 0; r < d; ++r) {
      double e = x_mat(r, c);
      for (const auto& [row, val] : col) e -= val * d_mat(r, row);
      res[c] += e * e;
    }
    if (col.size() >= cap) open[c] = 0;
  }

  while (surplus > 0) {
    std::size_t best_c = n;
    double best_res = 0.0;
    for (std::size_t c = 0; c < n; ++c)
      if (open[c] && res[c] > best_res) {
        best_res = res[c];
        best_c = c;
      }
    if (best_c == n) break;

    const std::size_t used = a.column_nnz(best_c);
    for (std::size_t r = 0; r < d; ++r) x[r] = x_mat(r, best_c);
    const OmpResult fresh = omp_core(d_mat, x.data(), used + 1, cfg);
    const SparseVector grown = omp_result_to_sparse(fresh, m);
    if (grown.entries().size() <= used || fresh.residual_sq >= res[best_c]) {
      open[best_c] = 0;
      continue;
    }
    surplus -= grown.entries().size() - used;
    a.set_column(best_c, grown);
    res[best_c] = fresh.residual_sq;
    if (a.column_nnz(best_c) >= cap) open[best_c] = 0;
  }
}

}  // namespace detail

}  // namespace gdl
