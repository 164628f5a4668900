#pragma once

// Per-atom sparse rank-1 machinery: the k-sparse PCA problem
//     max_w  w^T E^T E w   s.t.  ||w||2 = 1, ||w||0 <= k
// solved by truncated power iteration, the exact transform from its solution
// to the rank-1 pair (d, alpha) with d unit and alpha = ||Ew|| w, and the
// support-enumeration oracle used to test the solver.
//
// The iteration and the transform are written against a small operator
// concept (mul / tmul / column norms) so the learner can run them on a
// residual-plus-rank-one view without materializing E per atom.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "gdl/detail/linalg.hpp"
#include "gdl/errors.hpp"
#include "gdl/matrix.hpp"

namespace gdl {

struct SparsePcaConfig {
  std::size_t inner_iters = 30;  // cap on truncated power iterations
  double tol = 1e-9;             // stop when the objective gain falls below
                                 // tol * previous objective
  std::size_t restarts = 1;      // 1 = warm start only; extra restarts run
                                 // from the largest-norm single coordinates
};

struct Rank1Fit {
  std::vector<double> atom;  // unit direction d
  SparseVector row;          // alpha, same support as the solver's w
};

namespace detail {

using SparseEntries = std::vector<SparseVector::Entry>;

struct DenseEOp {
  const DenseMatrix& e;
  std::size_t rows() const { return e.rows(); }
  std::size_t cols() const { return e.cols(); }
  void mul(const SparseEntries& w, std::vector<double>& y) const {
    y.assign(e.rows(), 0.0);
    for (const auto& [j, wj] : w)
      for (std::size_t r = 0; r < e.rows(); ++r) y[r] += wj * e(r, j);
  }
  void tmul(const std::vector<double>& u, std::vector<double>& z) const {
    z.assign(e.cols(), 0.0);
    for (std::size_t r = 0; r < e.rows(); ++r) {
      const double ur = u[r];
      const double* row = e.row_ptr(r);
      for (std::size_t c = 0; c < e.cols(); ++c) z[c] += ur * row[c];
    }
  }
  double col_norm_sq(std::size_t j) const { return e.column_norm_sq(j); }
};

struct SparsePcaOutcome {
  SparseEntries w;         // unit norm, sorted by index
  double objective = 0.0;  // w^T E^T E w = ||E w||^2
};

inline double entries_norm(const SparseEntries& w) {
  double s = 0.0;
  for (const auto& [j, v] : w) s += v * v;
  return std::sqrt(s);
}

// Truncated power iteration from one start; keeps the best w seen, so the
// result is never worse than the start itself.
template <class Op>
void sparse_pca_single_start(const Op& e, std::size_t k, SparseEntries w,
                             const SparsePcaConfig& cfg,
                             SparsePcaOutcome& best) {
  const std::size_t n = e.cols();
  std::vector<double> y, z;
  std::vector<std::size_t> idx;

  e.mul(w, y);
  double obj = 0.0;
  for (double v : y) obj += v * v;
  if (obj > best.objective || best.w.empty()) {
    best.objective = obj;
    best.w = w;
  }
  double prev = obj;

  for (std::size_t t = 0; t < cfg.inner_iters; ++t) {
    const double y_norm = std::sqrt(obj);
    if (y_norm < 1e-150) break;
    std::vector<double>& u = y;
    for (double& v : u) v /= y_norm;
    e.tmul(u, z);

    idx.resize(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    const std::size_t keep = std::min(k, n);
    std::partial_sort(idx.begin(), idx.begin() + keep, idx.end(),
                      [&z](std::size_t a, std::size_t b) {
                        const double ma = std::abs(z[a]), mb = std::abs(z[b]);
                        if (ma != mb) return ma > mb;
                        return a < b;
                      });
    SparseEntries next;
    next.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i)
      if (z[idx[i]] != 0.0) next.emplace_back(idx[i], z[idx[i]]);
    std::sort(next.begin(), next.end());
    const double norm = entries_norm(next);
    if (norm < 1e-150) break;
    for (auto& [j, v] : next) v /= norm;
    w = std::move(next);

    e.mul(w, y);
    obj = 0.0;
    for (double v : y) obj += v * v;
    if (obj > best.objective) {
      best.objective = obj;
      best.w = w;
    }
    if (obj - prev <= cfg.tol * std::max(prev, 1e-300)) break;
    prev = obj;
  }
}

template <class Op>
SparsePcaOutcome sparse_pca_core(const Op& e, std::size_t k,
                                 const SparseEntries* w0,
                                 const SparsePcaConfig& cfg) {
  if (k == 0) throw InvalidArgument("sparse_pca: k must be positive");
  const std::size_t n = e.cols();

  std::vector<SparseEntries> starts;
  if (w0) {
    SparseEntries w = *w0;
    const double norm = entries_norm(w);
    if (norm < 1e-150)
      throw InvalidArgument("sparse_pca: zero warm start");
    for (auto& [j, v] : w) v /= norm;
    starts.push_back(std::move(w));
  }
  const std::size_t extra =
      std::max<std::size_t>(cfg.restarts, 1) - (w0 ? 1 : 0);
  if (extra > 0) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> norms(n);
    for (std::size_t j = 0; j < n; ++j) norms[j] = e.col_norm_sq(j);
    const std::size_t take = std::min(extra, n);
    std::partial_sort(order.begin(), order.begin() + take, order.end(),
                      [&norms](std::size_t a, std::size_t b) {
                        if (norms[a] != norms[b]) return norms[a] > norms[b];
                        return a < b;
                      });
    // First slot: the unconstrained leading direction, truncated to the k
    // largest coordinates. Strong whenever that direction is nearly
    // k-sparse, which single coordinates alone approach slowly.
    if (norms[order[0]] > 0.0) {
      std::vector<double> z(n, 0.0), y;
      z[order[0]] = 1.0;
      SparseEntries zw;
      for (std::size_t t = 0; t < 12; ++t) {
        zw.clear();
        for (std::size_t j = 0; j < n; ++j)
          if (z[j] != 0.0) zw.emplace_back(j, z[j]);
        e.mul(zw, y);
        double yn = 0.0;
        for (double v : y) yn += v * v;
        yn = std::sqrt(yn);
        if (yn < 1e-150) break;
        for (double& v : y) v /= yn;
        e.tmul(y, z);
        double zn = 0.0;
        for (double v : z) zn += v * v;
        zn = std::sqrt(zn);
        if (zn < 1e-150) break;
        for (double& v : z) v /= zn;
      }
      std::vector<std::size_t> top(n);
      std::iota(top.begin(), top.end(), std::size_t{0});
      const std::size_t keep = std::min(k, n);
      std::partial_sort(top.begin(), top.begin() + keep, top.end(),
                        [&z](std::size_t a, std::size_t b) {
                          const double ma = std::abs(z[a]), mb = std::abs(z[b]);
                          if (ma != mb) return ma > mb;
                          return a < b;
                        });
      SparseEntries lead;
      lead.reserve(keep);
      for (std::size_t i = 0; i < keep; ++i)
        if (z[top[i]] != 0.0) lead.emplace_back(top[i], z[top[i]]);
      std::sort(lead.begin(), lead.end());
      const double ln = entries_norm(lead);
      if (ln >= 1e-150) {
        for (auto& [j, v] : lead) v /= ln;
        starts.push_back(std::move(lead));
      }
    }
    for (std::size_t i = 0; i + 1 < take; ++i)
      starts.push_back({{order[i], 1.0}});
  }

  SparsePcaOutcome best;
  for (const auto& start : starts)
    sparse_pca_single_start(e, k, start, cfg, best);
  return best;
}

// Transform of a unit k-sparse direction w into the optimal rank-1 pair:
// d = Ew / ||Ew||, alpha = ||Ew|| w. Shares w's support exactly.
template <class Op>
Rank1Fit theorem1_transform_core(const Op& e, const SparseEntries& w) {
  std::vector<double> y;
  e.mul(w, y);
  double norm_sq = 0.0;
  for (double v : y) norm_sq += v * v;
  const double norm = std::sqrt(norm_sq);
  if (norm <= 1e-12)
    throw DegenerateDirection("||E w||2 = " + std::to_string(norm));
  Rank1Fit fit;
  fit.atom.resize(y.size());
  for (std::size_t r = 0; r < y.size(); ++r) fit.atom[r] = y[r] / norm;
  SparseEntries alpha = w;
  for (auto& [j, v] : alpha) v *= norm;
  fit.row = SparseVector::from_entries(e.cols(), std::move(alpha));
  return fit;
}

}  // namespace detail

// Truncated power iteration for the k-sparse leading direction of E^T E.
// With a warm start the result's objective is never below the warm start's.
inline SparseVector sparse_pca_rank1(const DenseMatrix& e, std::size_t k,
                                     const SparseVector* w0 = nullptr,
                                     const SparsePcaConfig& cfg = {}) {
  if (frobenius_norm_sq(e) < 1e-24)
    throw ZeroMatrix("sparse_pca_rank1: ||E||_F < 1e-12");
  detail::SparseEntries start;
  if (w0) {
    if (w0->dim() != e.cols())
      throw DimensionMismatch("sparse_pca_rank1: warm start length");
    if (w0->nnz() > k)
      throw InvalidArgument("sparse_pca_rank1: warm start has more than k nonzeros");
    if (std::abs(std::sqrt(w0->norm_sq()) - 1.0) > 1e-8)
      throw InvalidArgument("sparse_pca_rank1: warm start must be unit norm");
    start = w0->entries();
  }
  const auto out = detail::sparse_pca_core(detail::DenseEOp{e}, k,
                                           w0 ? &start : nullptr, cfg);
  return SparseVector::from_entries(e.cols(), out.w);
}

// d = Ew/||Ew||, alpha = ||Ew|| w; exact solution of the rank-1 problem for a
// fixed direction w.
inline Rank1Fit theorem1_transform(const DenseMatrix& e, const SparseVector& w) {
  if (w.dim() != e.cols())
    throw DimensionMismatch("theorem1_transform: w length " +
                            std::to_string(w.dim()) + " vs " +
                            std::to_string(e.cols()) + " cols");
  if (std::abs(std::sqrt(w.norm_sq()) - 1.0) > 1e-8)
    throw InvalidArgument("theorem1_transform: w must be unit norm");
  return detail::theorem1_transform_core(detail::DenseEOp{e}, w.entries());
}

// Solve + transform in one call. When warm is given the returned pair's
// residual never exceeds the residual of re-fitting warm's direction, because
// the solver starts there and keeps its best iterate.
inline Rank1Fit sparse_rank1_update(const DenseMatrix& e, std::size_t k,
                                    const SparseVector* warm = nullptr,
                                    const SparsePcaConfig& cfg = {}) {
  const SparseVector w = sparse_pca_rank1(e, k, warm, cfg);
  return detail::theorem1_transform_core(detail::DenseEOp{e}, w.entries());
}

// Brute force: every size-k support, leading eigenvector of the restricted
// E^T E by power iteration. Ties go to the lexicographically smallest
// support; the sign makes the largest-magnitude entry positive.
inline SparseVector sparse_pca_oracle(const DenseMatrix& e, std::size_t k) {
  const std::size_t n = e.cols();
  if (k == 0 || k > n)
    throw InvalidArgument("sparse_pca_oracle: need 1 <= k <= n");
  {
    double c = 1.0;
    for (std::size_t j = 1; j <= k; ++j)
      c = c * static_cast<double>(n - j + 1) / static_cast<double>(j);
    if (c > 1e6) throw TooLarge("sparse_pca_oracle: more than 1e6 supports");
  }
  if (frobenius_norm_sq(e) < 1e-24)
    throw ZeroMatrix("sparse_pca_oracle: ||E||_F < 1e-12");

  const std::size_t d = e.rows();
  std::vector<std::size_t> support(k);
  for (std::size_t i = 0; i < k; ++i) support[i] = i;

  double best_obj = -1.0;
  std::vector<std::size_t> best_support;
  std::vector<double> best_vec;

  std::vector<double> gram(k * k);
  std::vector<double> vec;
  for (;;) {
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = a; b < k; ++b) {
        double s = 0.0;
        for (std::size_t r = 0; r < d; ++r)
          s += e(r, support[a]) * e(r, support[b]);
        gram[a * k + b] = s;
        gram[b * k + a] = s;
      }
    const double lambda = detail::leading_eig_sym(gram, k, vec);
    if (lambda > best_obj) {
      best_obj = lambda;
      best_support = support;
      best_vec = vec;
    }
    std::size_t i = k;
    while (i > 0 && support[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) break;
    ++support[i - 1];
    for (std::size_t j = i; j < k; ++j) support[j] = support[j - 1] + 1;
  }

  // Fix the sign: largest-magnitude entry positive, first such on ties.
  std::size_t arg = 0;
  for (std::size_t i = 1; i < best_vec.size(); ++i)
    if (std::abs(best_vec[i]) > std::abs(best_vec[arg])) arg = i;
  if (best_vec[arg] < 0.0)
    for (double& v : best_vec) v = -v;

  std::vector<SparseVector::Entry> entries;
  for (std::size_t i = 0; i < best_support.size(); ++i)
    if (best_vec[i] != 0.0) entries.emplace_back(best_support[i], best_vec[i]);
  return SparseVector::from_entries(n, std::move(entries));
}

}  // namespace gdl
