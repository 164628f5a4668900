#pragma once

// Dictionary learning under a global coefficient budget: alternate a column
// stage (per-signal OMP, each column keeping its current nonzero count as its
// budget) with a row stage (per-atom sparse rank-1 update, each row keeping
// its current count). Nonzeros move across rows in the column stage and
// across columns in the row stage; the total never exceeds the budget.
//
// Both stages are constructed to never increase ||X - DA||_F^2: the column
// stage keeps the best of the fresh OMP fit, a re-fit of the old support and
// the old values; the row stage warm-starts the sparse PCA iteration at the
// current row and keeps the best iterate seen.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_set>
#include <utility>
#include <vector>

#include "gdl/errors.hpp"
#include "gdl/matrix.hpp"
#include "gdl/metrics.hpp"
#include "gdl/omp.hpp"
#include "gdl/rng.hpp"
#include "gdl/sparse_pca.hpp"

namespace gdl {

struct GdlConfig {
  std::size_t m = 0;            // atoms
  std::size_t K = 0;            // global nonzero cap
  std::size_t max_iters = 100;
  double objective_tol = 1e-6;  // stop when the relative objective decrease
                                // drops below this; 0 disables the early stop
  std::uint64_t seed = 0;
  OmpConfig omp_cfg{.swap_refine = true};
  // Extra restarts make the rank-1 refits far more likely to escape the
  // blended-atom plateaus that dominate the noiseless regime.
  SparsePcaConfig spca_cfg{.restarts = 6};
};

struct GroundTruth {
  DenseMatrix dictionary;     // true atoms, unit columns
  DenseMatrix clean_signals;  // noise-free signals
};

struct IterationRecord {
  std::size_t iteration = 0;  // 1-based
  double objective = 0.0;
  std::size_t nnz = 0;
  double seconds = 0.0;
  std::optional<double> re;  // vs ground-truth clean signals
  std::optional<double> dr;  // vs ground-truth dictionary
};

struct RunHistory {
  std::vector<IterationRecord> records;
};

struct LearnResult {
  DenseMatrix dictionary;
  SparseCoeffMatrix coefficients{0, 0, 0};
  RunHistory history;
};

// Invoked after every completed iteration (progress reporting).
using IterationCallback = std::function<void(const IterationRecord&)>;

inline double objective(const DenseMatrix& x, const DenseMatrix& d,
                        const SparseCoeffMatrix& a) {
  if (d.rows() != x.rows() || a.rows() != d.cols() || a.cols() != x.cols())
    throw DimensionMismatch("objective: inconsistent shapes");
  double total = 0.0;
  std::vector<double> col(x.rows());
  for (std::size_t c = 0; c < x.cols(); ++c) {
    for (std::size_t r = 0; r < x.rows(); ++r) col[r] = x(r, c);
    for (const auto& [row, val] : a.column(c))
      for (std::size_t r = 0; r < x.rows(); ++r) col[r] -= val * d(r, row);
    for (double v : col) total += v * v;
  }
  return total;
}

namespace detail {

// m distinct training signals, sampled uniformly without replacement and
// normalized. Zero-norm signals are skipped; running out of candidates
// throws ZeroColumn.
inline DenseMatrix init_dictionary_from_signals(const DenseMatrix& x,
                                                std::size_t atoms, Rng& rng) {
  const std::size_t n = x.cols();
  if (atoms == 0) throw InvalidDims("init: atoms must be positive");
  if (atoms > n)
    throw InvalidArgument("init: cannot sample " + std::to_string(atoms) +
                          " distinct signals from " + std::to_string(n));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(order[i], order[j]);
  }
  DenseMatrix d(x.rows(), atoms);
  std::size_t filled = 0;
  for (std::size_t idx : order) {
    if (filled == atoms) break;
    double norm_sq = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) norm_sq += x(r, idx) * x(r, idx);
    const double norm = std::sqrt(norm_sq);
    if (norm < 1e-12) continue;
    for (std::size_t r = 0; r < x.rows(); ++r) d(r, filled) = x(r, idx) / norm;
    ++filled;
  }
  if (filled < atoms)
    throw ZeroColumn(filled);  // not enough nonzero signals to seed atoms
  return d;
}

// Residual-plus-rank-one view E = R + atom * row^T, so the row stage never
// materializes E.
struct ResidualRank1Op {
  const DenseMatrix& r_mat;
  const std::vector<double>& atom;
  const SparseEntries& row;

  std::size_t rows() const { return r_mat.rows(); }
  std::size_t cols() const { return r_mat.cols(); }

  void mul(const SparseEntries& w, std::vector<double>& y) const {
    const std::size_t d = r_mat.rows();
    y.assign(d, 0.0);
    for (const auto& [j, wj] : w)
      for (std::size_t rr = 0; rr < d; ++rr) y[rr] += wj * r_mat(rr, j);
    // + atom * (row . w); both entry lists are sorted by index
    double dot = 0.0;
    for (std::size_t a = 0, b = 0; a < row.size() && b < w.size();) {
      if (row[a].first < w[b].first) {
        ++a;
      } else if (row[a].first > w[b].first) {
        ++b;
      } else {
        dot += row[a].second * w[b].second;
        ++a;
        ++b;
      }
    }
    if (dot != 0.0)
      for (std::size_t rr = 0; rr < d; ++rr) y[rr] += dot * atom[rr];
  }

  void tmul(const std::vector<double>& u, std::vector<double>& z) const {
    const std::size_t d = r_mat.rows();
    z.assign(r_mat.cols(), 0.0);
    for (std::size_t rr = 0; rr < d; ++rr) {
      const double ur = u[rr];
      const double* rrow = r_mat.row_ptr(rr);
      for (std::size_t c = 0; c < r_mat.cols(); ++c) z[c] += ur * rrow[c];
    }
    double dot = 0.0;
    for (std::size_t rr = 0; rr < d; ++rr) dot += atom[rr] * u[rr];
    for (const auto& [j, v] : row) z[j] += v * dot;
  }

  double col_norm_sq(std::size_t j) const {
    double s = 0.0;
    double alpha_j = 0.0;
    for (const auto& [jj, v] : row)
      if (jj == j) {
        alpha_j = v;
        break;
      }
    for (std::size_t rr = 0; rr < r_mat.rows(); ++rr) {
      const double v = r_mat(rr, j) + alpha_j * atom[rr];
      s += v * v;
    }
    return s;
  }
};

// E = R + atom_a row_a^T + atom_b row_b^T without materializing E: the error
// matrix with two atoms' contributions restored, used when a near-duplicate
// pair is refit as a single rank-1 term.
struct ResidualRank2Op {
  const DenseMatrix& r_mat;
  const std::vector<double>& atom_a;
  const SparseEntries& row_a;
  const std::vector<double>& atom_b;
  const SparseEntries& row_b;

  std::size_t rows() const { return r_mat.rows(); }
  std::size_t cols() const { return r_mat.cols(); }

  static double sorted_dot(const SparseEntries& p, const SparseEntries& q) {
    double dot = 0.0;
    for (std::size_t a = 0, b = 0; a < p.size() && b < q.size();) {
      if (p[a].first < q[b].first) {
        ++a;
      } else if (p[a].first > q[b].first) {
        ++b;
      } else {
        dot += p[a].second * q[b].second;
        ++a;
        ++b;
      }
    }
    return dot;
  }

  static double row_value(const SparseEntries& row, std::size_t j) {
    const auto it = std::lower_bound(
        row.begin(), row.end(), j,
        [](const SparseVector::Entry& e, std::size_t c) { return e.first < c; });
    return (it != row.end() && it->first == j) ? it->second : 0.0;
  }

  void mul(const SparseEntries& w, std::vector<double>& y) const {
    const std::size_t d = r_mat.rows();
    y.assign(d, 0.0);
    for (const auto& [j, wj] : w)
      for (std::size_t rr = 0; rr < d; ++rr) y[rr] += wj * r_mat(rr, j);
    const double dot_a = sorted_dot(row_a, w);
    if (dot_a != 0.0)
      for (std::size_t rr = 0; rr < d; ++rr) y[rr] += dot_a * atom_a[rr];
    const double dot_b = sorted_dot(row_b, w);
    if (dot_b != 0.0)
      for (std::size_t rr = 0; rr < d; ++rr) y[rr] += dot_b * atom_b[rr];
  }

  void tmul(const std::vector<double>& u, std::vector<double>& z) const {
    const std::size_t d = r_mat.rows();
    z.assign(r_mat.cols(), 0.0);
    for (std::size_t rr = 0; rr < d; ++rr) {
      const double ur = u[rr];
      const double* rrow = r_mat.row_ptr(rr);
      for (std::size_t c = 0; c < r_mat.cols(); ++c) z[c] += ur * rrow[c];
    }
    double dot_a = 0.0, dot_b = 0.0;
    for (std::size_t rr = 0; rr < d; ++rr) {
      dot_a += atom_a[rr] * u[rr];
      dot_b += atom_b[rr] * u[rr];
    }
    for (const auto& [j, v] : row_a) z[j] += v * dot_a;
    for (const auto& [j, v] : row_b) z[j] += v * dot_b;
  }

  double col_norm_sq(std::size_t j) const {
    const double va = row_value(row_a, j);
    const double vb = row_value(row_b, j);
    double s = 0.0;
    for (std::size_t rr = 0; rr < r_mat.rows(); ++rr) {
      const double v = r_mat(rr, j) + va * atom_a[rr] + vb * atom_b[rr];
      s += v * v;
    }
    return s;
  }
};

}  // namespace detail

// Seeded start: D holds m distinct training signals (normalized), A holds
// exactly K nonzeros at uniformly random distinct cells with standard-normal
// values. Cells are drawn by rejection, sorted by (column, row), then valued
// in that order — same convention as gen_synthetic.
inline std::pair<DenseMatrix, SparseCoeffMatrix> gdl_init(const DenseMatrix& x,
                                                          const GdlConfig& cfg) {
  const std::size_t n = x.cols();
  if (cfg.m == 0) throw InvalidDims("gdl_init: m must be positive");
  if (cfg.K > cfg.m * n)
    throw BudgetTooLarge("gdl_init: budget " + std::to_string(cfg.K) +
                         " exceeds " + std::to_string(cfg.m * n) + " cells");
  if (n < cfg.m)
    std::cerr << "gdl_init: fewer signals (" << n << ") than atoms (" << cfg.m
              << ")\n";
  Rng rng(cfg.seed);
  DenseMatrix d = detail::init_dictionary_from_signals(x, cfg.m, rng);
  std::vector<std::tuple<std::size_t, std::size_t, double>> trips;
  trips.reserve(cfg.K);
  if (cfg.K > 0) {
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(cfg.K * 2);
    std::vector<std::uint64_t> ids;
    ids.reserve(cfg.K);
    const std::uint64_t total = static_cast<std::uint64_t>(cfg.m) * n;
    while (ids.size() < cfg.K) {
      const std::uint64_t id = rng.below(total);
      if (seen.insert(id).second) ids.push_back(id);
    }
    std::sort(ids.begin(), ids.end());
    for (std::uint64_t id : ids) {
      double v = rng.normal();
      while (v == 0.0) v = rng.normal();
      trips.emplace_back(static_cast<std::size_t>(id % cfg.m),
                         static_cast<std::size_t>(id / cfg.m), v);
    }
  }
  return {std::move(d),
          SparseCoeffMatrix::from_triplets(cfg.m, n, cfg.K, trips)};
}

// Column stage: re-code every signal with its current nonzero count as the
// OMP budget, keeping the previous fit whenever it is better. Capacity a
// column leaves unused (the pursuit stops at numerically zero residuals)
// moves to the worst-represented columns, so the global budget stays
// saturated instead of leaking. Never exceeds the incoming nnz, never
// increases the objective.
inline SparseCoeffMatrix column_stage(const DenseMatrix& x, const DenseMatrix& d,
                                      const SparseCoeffMatrix& a,
                                      const OmpConfig& cfg = {}) {
  if (d.rows() != x.rows() || a.rows() != d.cols() || a.cols() != x.cols())
    throw DimensionMismatch("column_stage: inconsistent shapes");
  detail::require_unit_columns(d);
  SparseCoeffMatrix next = a;
  std::vector<std::size_t> budgets(a.cols());
  for (std::size_t c = 0; c < a.cols(); ++c) budgets[c] = a.column_nnz(c);
  detail::code_columns_with_acceptance(d, x, budgets, next, cfg);
  detail::redistribute_column_surplus(d, x, a.nnz() - next.nnz(), next, cfg);
  return next;
}

// Row stage: per-atom sparse rank-1 update with the row's current count as
// its sparsity budget, warm-started at the current row. Atoms with empty
// rows are re-seeded from the worst-represented signal and keep an empty
// row. Optionally records the objective after every atom update.
inline std::pair<DenseMatrix, SparseCoeffMatrix> row_stage(
    const DenseMatrix& x, const DenseMatrix& d_in, const SparseCoeffMatrix& a_in,
    const SparsePcaConfig& cfg = {},
    std::vector<double>* per_atom_objectives = nullptr) {
  if (d_in.rows() != x.rows() || a_in.rows() != d_in.cols() ||
      a_in.cols() != x.cols())
    throw DimensionMismatch("row_stage: inconsistent shapes");
  const std::size_t d = x.rows(), m = d_in.cols(), n = x.cols();
  DenseMatrix dict = d_in;
  SparseCoeffMatrix a = a_in;

  // R = X - D A, kept current after every atom update.
  DenseMatrix r_mat = x;
  for (std::size_t c = 0; c < n; ++c)
    for (const auto& [row, val] : a.column(c))
      for (std::size_t r = 0; r < d; ++r) r_mat(r, c) -= val * dict(r, row);

  // Rows snapshot: updating row i never touches row j != i.
  std::vector<detail::SparseEntries> rows(m);
  for (std::size_t c = 0; c < n; ++c)
    for (const auto& [row, val] : a.column(c)) rows[row].emplace_back(c, val);

  std::vector<char> reseeded_from(n, 0);
  std::vector<double> atom(d), y;

  auto reseed_atom = [&](std::size_t i) {
    // Worst-represented signal, skipping signals already used this stage.
    double best = -1.0;
    std::size_t best_j = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (reseeded_from[j]) continue;
      const double s = r_mat.column_norm_sq(j);
      if (s > best) {
        best = s;
        best_j = j;
      }
    }
    if (best_j == n) return;  // every signal used already; keep the atom
    double norm_sq = 0.0;
    for (std::size_t r = 0; r < d; ++r) norm_sq += x(r, best_j) * x(r, best_j);
    const double norm = std::sqrt(norm_sq);
    if (norm < 1e-12) return;  // nothing usable to re-seed from
    reseeded_from[best_j] = 1;
    for (std::size_t r = 0; r < d; ++r) dict(r, i) = x(r, best_j) / norm;
  };

  // Starved atoms update first: a small row gets to claim the dominant
  // residual direction before better-served atoms absorb it back.
  std::vector<std::size_t> atom_order(m);
  std::iota(atom_order.begin(), atom_order.end(), std::size_t{0});
  std::stable_sort(atom_order.begin(), atom_order.end(),
                   [&rows](std::size_t p, std::size_t q) {
                     return rows[p].size() < rows[q].size();
                   });

  for (const std::size_t i : atom_order) {
    const detail::SparseEntries& row = rows[i];
    if (row.empty()) {
      reseed_atom(i);
      if (per_atom_objectives)
        per_atom_objectives->push_back(objective(x, dict, a));
      continue;
    }
    for (std::size_t r = 0; r < d; ++r) atom[r] = dict(r, i);

    const detail::ResidualRank1Op op{r_mat, atom, row};

    // Warm start: the current row, normalized. By the rank-1 transform the
    // warm start already matches or beats the stored (atom, row) pair, and
    // the solver never returns anything worse than its start.
    detail::SparseEntries w0 = row;
    const double wn = detail::entries_norm(w0);
    bool degenerate = wn < 1e-150;
    detail::SparsePcaOutcome sol;
    double norm = 0.0;
    if (!degenerate) {
      for (auto& [j, v] : w0) v /= wn;
      sol = detail::sparse_pca_core(op, row.size(), &w0, cfg);
      op.mul(sol.w, y);
      double norm_sq = 0.0;
      for (double v : y) norm_sq += v * v;
      norm = std::sqrt(norm_sq);
      if (norm <= 1e-12) degenerate = true;
    }

    if (degenerate) {
      // Even the best direction explains (numerically) nothing: clear the
      // row, fold its old contribution back into the residual, re-seed.
      for (const auto& [c, v] : row)
        for (std::size_t r = 0; r < d; ++r) r_mat(r, c) += v * atom[r];
      a.set_row(i, {});
      rows[i].clear();
      reseed_atom(i);
      if (per_atom_objectives)
        per_atom_objectives->push_back(objective(x, dict, a));
      continue;
    }

    // d_new = Ew/||Ew||, alpha_new = ||Ew|| w (the rank-1 transform, inlined
    // on the Ew we already hold). Entries that underflow to zero are dropped.
    detail::SparseEntries alpha;
    alpha.reserve(sol.w.size());
    for (const auto& [j, v] : sol.w)
      if (v * norm != 0.0) alpha.emplace_back(j, v * norm);

    // R <- R + d_old row_old^T - d_new alpha^T on the affected columns.
    for (const auto& [c, v] : row)
      for (std::size_t r = 0; r < d; ++r) r_mat(r, c) += v * atom[r];
    for (const auto& [c, v] : alpha)
      for (std::size_t r = 0; r < d; ++r) r_mat(r, c) -= v * (y[r] / norm);

    for (std::size_t r = 0; r < d; ++r) dict(r, i) = y[r] / norm;
    a.set_row(i, alpha);
    rows[i] = std::move(alpha);  // keep the snapshot usable by the merge pass
    if (per_atom_objectives)
      per_atom_objectives->push_back(objective(x, dict, a));
  }

  // Merge pass: two atoms that converged onto the same direction block each
  // other permanently — each row's capacity is too small to serve all the
  // columns both cover, and per-atom updates cannot move capacity between
  // rows. A near-duplicate pair is refit as one rank-1 term with the
  // combined capacity; the merge commits only when the exactly computed
  // objective does not increase, the freed atom is re-seeded with an empty
  // row, and the total nonzero count never grows.
  constexpr double kTwinCos = 0.90;
  std::vector<char> in_merge(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    if (in_merge[i] || rows[i].empty()) continue;
    for (std::size_t j = i + 1; j < m; ++j) {
      if (in_merge[j] || rows[j].empty()) continue;
      double cos = 0.0;
      for (std::size_t r = 0; r < d; ++r) cos += dict(r, i) * dict(r, j);
      if (std::abs(cos) < kTwinCos) continue;

      // Keep the atom with the larger row; the other frees its capacity.
      const std::size_t keep = rows[i].size() >= rows[j].size() ? i : j;
      const std::size_t drop = keep == i ? j : i;
      std::vector<double> atom_keep(d), atom_drop(d);
      for (std::size_t r = 0; r < d; ++r) {
        atom_keep[r] = dict(r, keep);
        atom_drop[r] = dict(r, drop);
      }
      const detail::ResidualRank2Op op{r_mat, atom_keep, rows[keep],
                                       atom_drop, rows[drop]};

      // Warm start: both rows summed per column (supports may overlap).
      detail::SparseEntries w0;
      {
        const auto& ra = rows[keep];
        const auto& rb = rows[drop];
        std::size_t pa = 0, pb = 0;
        while (pa < ra.size() || pb < rb.size()) {
          if (pb == rb.size() || (pa < ra.size() && ra[pa].first < rb[pb].first)) {
            w0.push_back(ra[pa++]);
          } else if (pa == ra.size() || rb[pb].first < ra[pa].first) {
            // The dropped atom's coefficients, expressed in the kept atom's
            // frame: d_drop ~ cos * d_keep.
            w0.emplace_back(rb[pb].first, cos * rb[pb].second);
            ++pb;
          } else {
            const double s = ra[pa].second + cos * rb[pb].second;
            if (s != 0.0) w0.emplace_back(ra[pa].first, s);
            ++pa;
            ++pb;
          }
        }
      }
      const double w0n = detail::entries_norm(w0);
      if (w0.empty() || w0n < 1e-150) continue;
      for (auto& [c, v] : w0) v /= w0n;

      const std::size_t budget =
          std::min(rows[keep].size() + rows[drop].size(), n);
      const auto sol = detail::sparse_pca_core(op, budget, &w0, cfg);
      op.mul(sol.w, y);
      double norm_sq = 0.0;
      for (double v : y) norm_sq += v * v;
      const double norm = std::sqrt(norm_sq);
      if (norm <= 1e-12) continue;

      // Commit test over the affected columns: the pair's current residual
      // against the residual of the merged fit, both exact.
      double pair_res_old = 0.0, pair_e_sq = 0.0;
      {
        std::vector<char> touched(n, 0);
        for (const auto& [c, v] : rows[keep]) touched[c] = 1;
        for (const auto& [c, v] : rows[drop]) touched[c] = 1;
        for (const auto& [c, v] : sol.w) touched[c] = 1;
        for (std::size_t c = 0; c < n; ++c)
          if (touched[c]) {
            pair_res_old += r_mat.column_norm_sq(c);
            pair_e_sq += op.col_norm_sq(c);
          }
      }
      const double pair_res_new = pair_e_sq - norm_sq;
      if (pair_res_new > pair_res_old) continue;
#ifdef GDL_MERGE_DEBUG
      const double dbg_before = objective(x, dict, a);
#endif

      detail::SparseEntries alpha;
      alpha.reserve(sol.w.size());
      for (const auto& [c, v] : sol.w)
        if (v * norm != 0.0) alpha.emplace_back(c, v * norm);
      if (alpha.empty()) continue;

      // Fold both old contributions back, subtract the merged fit.
      for (const auto& [c, v] : rows[keep])
        for (std::size_t r = 0; r < d; ++r) r_mat(r, c) += v * atom_keep[r];
      for (const auto& [c, v] : rows[drop])
        for (std::size_t r = 0; r < d; ++r) r_mat(r, c) += v * atom_drop[r];
      for (const auto& [c, v] : alpha)
        for (std::size_t r = 0; r < d; ++r) r_mat(r, c) -= v * (y[r] / norm);

      for (std::size_t r = 0; r < d; ++r) dict(r, keep) = y[r] / norm;
      a.set_row(drop, {});  // freed first: the merged row may need its slots
      rows[drop].clear();
      a.set_row(keep, alpha);
      rows[keep] = alpha;
      reseed_atom(drop);
      in_merge[keep] = 1;
      in_merge[drop] = 1;
#ifdef GDL_MERGE_DEBUG
      const double dbg_after = objective(x, dict, a);
      if (dbg_after > dbg_before + 1e-9)
        std::cerr << "MERGE BUG: keep=" << keep << " drop=" << drop
                  << " before=" << dbg_before << " after=" << dbg_after
                  << " pair_old=" << pair_res_old
                  << " pair_new=" << pair_res_new << " cos=" << cos
                  << " budget=" << budget << " |alpha|=" << alpha.size()
                  << "\n";
#endif
      if (per_atom_objectives)
        per_atom_objectives->push_back(objective(x, dict, a));
      break;
    }
  }
  return {std::move(dict), std::move(a)};
}

// Full run: init, then alternate column and row stages, recording one
// history row per iteration. With ground truth the history also carries the
// representation error and recovery rate per iteration.
inline LearnResult gdl_learn(const DenseMatrix& x, const GdlConfig& cfg,
                             const GroundTruth* gt = nullptr,
                             const IterationCallback& on_iteration = {}) {
  if (cfg.max_iters == 0)
    throw InvalidArgument("gdl_learn: max_iters must be positive");
  auto [dict, a] = gdl_init(x, cfg);
  RunHistory history;
  double prev = objective(x, dict, a);
  for (std::size_t it = 1; it <= cfg.max_iters; ++it) {
    const auto t0 = std::chrono::steady_clock::now();
    a = column_stage(x, dict, a, cfg.omp_cfg);
    a.validate_counts();
    std::tie(dict, a) = row_stage(x, dict, a, cfg.spca_cfg);
    a.validate_counts();
    const double obj = objective(x, dict, a);
    const auto t1 = std::chrono::steady_clock::now();

    IterationRecord rec;
    rec.iteration = it;
    rec.objective = obj;
    rec.nnz = a.nnz();
    rec.seconds = std::chrono::duration<double>(t1 - t0).count();
    if (gt) {
      DenseMatrix x_hat(x.rows(), x.cols());
      for (std::size_t c = 0; c < x.cols(); ++c)
        for (const auto& [row, val] : a.column(c))
          for (std::size_t r = 0; r < x.rows(); ++r)
            x_hat(r, c) += val * dict(r, row);
      rec.re = representation_error(gt->clean_signals, x_hat);
      rec.dr = dictionary_recovery_rate(gt->dictionary, dict);
    }
    history.records.push_back(rec);
    if (on_iteration) on_iteration(rec);

    if (cfg.objective_tol > 0.0 && prev > 0.0 &&
        (prev - obj) / prev < cfg.objective_tol)
      break;
    prev = obj;
  }
  return {std::move(dict), std::move(a), std::move(history)};
}

}  // namespace gdl
