#pragma once

// Comparison dictionary learners: K-SVD under a fixed per-column sparsity,
// MOD, and the fixed overcomplete DCT dictionary. All three share the
// learner's containers and history format so runs pair up directly.

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "gdl/detail/linalg.hpp"
#include "gdl/errors.hpp"
#include "gdl/learner.hpp"
#include "gdl/matrix.hpp"
#include "gdl/omp.hpp"
#include "gdl/rng.hpp"

namespace gdl {

struct BaselineConfig {
  std::size_t m = 0;             // atoms
  std::size_t k_per_column = 0;  // fixed sparsity per signal
  std::size_t max_iters = 100;
  std::uint64_t seed = 0;
  double ridge = 1e-8;  // MOD only
  OmpConfig omp_cfg{};
};

namespace detail {

inline void require_baseline_config(const BaselineConfig& cfg) {
  if (cfg.m == 0) throw InvalidDims("baseline: m must be positive");
  if (cfg.k_per_column == 0)
    throw InvalidArgument("baseline: k_per_column must be positive");
  if (cfg.max_iters == 0)
    throw InvalidArgument("baseline: max_iters must be positive");
}

inline void record_iteration(const DenseMatrix& x, const DenseMatrix& dict,
                             const SparseCoeffMatrix& a, std::size_t it,
                             double seconds, const GroundTruth* gt,
                             RunHistory& history) {
  IterationRecord rec;
  rec.iteration = it;
  rec.objective = objective(x, dict, a);
  rec.nnz = a.nnz();
  rec.seconds = seconds;
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
}

}  // namespace detail

// K-SVD with every column coded to at most k_per_column atoms. The coding
// stage keeps the previous column whenever fresh OMP would be worse, and the
// per-atom rank-1 update touches only the columns already using the atom, so
// the objective never increases. `init_dict` warm-starts from an existing
// unit-column dictionary instead of sampling training signals.
inline LearnResult ksvd_pk_learn(const DenseMatrix& x,
                                 const BaselineConfig& cfg,
                                 const GroundTruth* gt = nullptr,
                                 const IterationCallback& on_iteration = {},
                                 const DenseMatrix* init_dict = nullptr) {
  detail::require_baseline_config(cfg);
  const std::size_t d = x.rows(), n = x.cols();
  if (init_dict && (init_dict->rows() != d || init_dict->cols() != cfg.m))
    throw DimensionMismatch("ksvd: init dictionary shape");
  Rng rng(cfg.seed);
  DenseMatrix dict = init_dict
                         ? *init_dict
                         : detail::init_dictionary_from_signals(x, cfg.m, rng);
  SparseCoeffMatrix a(cfg.m, n, cfg.k_per_column * n);
  const std::vector<std::size_t> budgets(n, cfg.k_per_column);

  RunHistory history;
  std::vector<double> atom(d), u, v;
  for (std::size_t it = 1; it <= cfg.max_iters; ++it) {
    const auto t0 = std::chrono::steady_clock::now();
    detail::code_columns_with_acceptance(dict, x, budgets, a, cfg.omp_cfg);
    a.validate_counts();

    // R = X - D A, updated in place per atom.
    DenseMatrix r_mat = x;
    for (std::size_t c = 0; c < n; ++c)
      for (const auto& [row, val] : a.column(c))
        for (std::size_t r = 0; r < d; ++r) r_mat(r, c) -= val * dict(r, row);

    std::vector<char> reseeded_from(n, 0);
    for (std::size_t i = 0; i < cfg.m; ++i) {
      const auto row = a.row_snapshot(i);
      if (row.empty()) {
        // Dead atom: replace with the worst-represented signal.
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
        if (best_j == n) continue;
        double norm_sq = 0.0;
        for (std::size_t r = 0; r < d; ++r)
          norm_sq += x(r, best_j) * x(r, best_j);
        const double norm = std::sqrt(norm_sq);
        if (norm < 1e-12) continue;
        reseeded_from[best_j] = 1;
        for (std::size_t r = 0; r < d; ++r) dict(r, i) = x(r, best_j) / norm;
        continue;
      }

      for (std::size_t r = 0; r < d; ++r) atom[r] = dict(r, i);

      // Restricted residual with atom i's contribution restored, one column
      // per signal currently using the atom.
      DenseMatrix e_restricted(d, row.size());
      for (std::size_t j = 0; j < row.size(); ++j) {
        const auto& [c, val] = row[j];
        for (std::size_t r = 0; r < d; ++r)
          e_restricted(r, j) = r_mat(r, c) + val * atom[r];
      }

      u = atom;
      const double sigma = detail::rank1_svd_warm(e_restricted, u, v);
      if (sigma < 1e-300) continue;  // nothing to explain; keep the old pair

      std::vector<SparseCoeffMatrix::Entry> new_row;
      new_row.reserve(row.size());
      for (std::size_t j = 0; j < row.size(); ++j)
        if (sigma * v[j] != 0.0)
          new_row.emplace_back(row[j].first, sigma * v[j]);

      // R picks up the swap from (atom, row) to (u, sigma v) on the
      // affected columns.
      for (const auto& [c, val] : row)
        for (std::size_t r = 0; r < d; ++r) r_mat(r, c) += val * atom[r];
      for (const auto& [c, val] : new_row)
        for (std::size_t r = 0; r < d; ++r) r_mat(r, c) -= val * u[r];

      for (std::size_t r = 0; r < d; ++r) dict(r, i) = u[r];
      a.set_row(i, new_row);
    }
    a.validate_counts();
    const auto t1 = std::chrono::steady_clock::now();
    detail::record_iteration(x, dict, a, it,
                             std::chrono::duration<double>(t1 - t0).count(),
                             gt, history);
    if (on_iteration) on_iteration(history.records.back());
  }
  return {std::move(dict), std::move(a), std::move(history)};
}

namespace detail {

// Closed-form MOD update: the D minimizing ||X - DA||_F^2 with A fixed,
// ridge-stabilized. Solves (A A^T + ridge I) D^T = A X^T by Cholesky; a
// positive ridge that still fails is escalated a thousandfold twice before
// giving up.
inline DenseMatrix mod_dictionary_update(const DenseMatrix& x,
                                         const SparseCoeffMatrix& a,
                                         double ridge) {
  const std::size_t d = x.rows(), m = a.rows(), n = x.cols();
  std::vector<double> gram(m * m, 0.0);
  DenseMatrix b(d, m);  // X A^T
  for (std::size_t c = 0; c < n; ++c) {
    const auto& col = a.column(c);
    for (const auto& [r1, v1] : col) {
      for (const auto& [r2, v2] : col) gram[r1 * m + r2] += v1 * v2;
      for (std::size_t r = 0; r < d; ++r) b(r, r1) += v1 * x(r, c);
    }
  }

  std::vector<double> fac;
  double shift = ridge;
  bool ok = false;
  for (int attempt = 0; attempt < 3 && !ok; ++attempt) {
    fac = gram;
    if (shift > 0.0)
      for (std::size_t i = 0; i < m; ++i) fac[i * m + i] += shift;
    ok = cholesky_factor(fac, m);
    if (!ok) {
      if (ridge == 0.0) break;
      shift *= 1000.0;
    }
  }
  if (!ok)
    throw SingularGram("mod update: A A^T " +
                       std::string(ridge == 0.0 ? "singular without ridge"
                                                : "singular despite ridge"));

  DenseMatrix dict(d, m);
  std::vector<double> rhs(m);
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t i = 0; i < m; ++i) rhs[i] = b(r, i);
    cholesky_solve(fac, m, rhs);
    for (std::size_t i = 0; i < m; ++i) dict(r, i) = rhs[i];
  }
  return dict;
}

}  // namespace detail

// MOD: plain batch OMP coding, then the closed-form dictionary update.
// Normalized columns hand their norms to the matching coefficient rows so
// normalization itself never moves D A; columns that come back numerically
// zero keep their previous atom.
inline LearnResult mod_learn(const DenseMatrix& x, const BaselineConfig& cfg,
                             const GroundTruth* gt = nullptr,
                             const IterationCallback& on_iteration = {},
                             const DenseMatrix* init_dict = nullptr) {
  detail::require_baseline_config(cfg);
  const std::size_t n = x.cols();
  if (init_dict && (init_dict->rows() != x.rows() || init_dict->cols() != cfg.m))
    throw DimensionMismatch("mod: init dictionary shape");
  Rng rng(cfg.seed);
  DenseMatrix dict = init_dict
                         ? *init_dict
                         : detail::init_dictionary_from_signals(x, cfg.m, rng);
  const std::vector<std::size_t> budgets(n, cfg.k_per_column);

  RunHistory history;
  SparseCoeffMatrix a(cfg.m, n, cfg.k_per_column * n);
  for (std::size_t it = 1; it <= cfg.max_iters; ++it) {
    const auto t0 = std::chrono::steady_clock::now();
    a = column_stage_code(dict, x, budgets, cfg.omp_cfg);
    a.validate_counts();

    const DenseMatrix updated = detail::mod_dictionary_update(x, a, cfg.ridge);
    for (std::size_t i = 0; i < cfg.m; ++i) {
      const double norm = std::sqrt(updated.column_norm_sq(i));
      if (norm < 1e-12) continue;  // dead column, previous atom stays
      for (std::size_t r = 0; r < x.rows(); ++r)
        dict(r, i) = updated(r, i) / norm;
      a.scale_row(i, norm);
    }
    a.validate_counts();
    const auto t1 = std::chrono::steady_clock::now();
    detail::record_iteration(x, dict, a, it,
                             std::chrono::duration<double>(t1 - t0).count(),
                             gt, history);
    if (on_iteration) on_iteration(history.records.back());
  }
  return {std::move(dict), std::move(a), std::move(history)};
}

// Overcomplete DCT dictionary for p x p patches, q atoms per axis: the 1-D
// prototype V[r, c] = cos(pi r c / q) with every column past the first
// mean-subtracted, expanded as the Kronecker product V (x) V, columns
// normalized. p=8, q=16 gives the 64 x 256 patch dictionary.
inline DenseMatrix overcomplete_dct_dictionary(std::size_t p, std::size_t q) {
  if (p == 0 || q < p)
    throw InvalidDims("dct dictionary: need 1 <= patch side <= atoms per dim");
  DenseMatrix v(p, q);
  for (std::size_t r = 0; r < p; ++r)
    for (std::size_t c = 0; c < q; ++c)
      v(r, c) = std::cos(std::numbers::pi * static_cast<double>(r) *
                         static_cast<double>(c) / static_cast<double>(q));
  for (std::size_t c = 1; c < q; ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < p; ++r) mean += v(r, c);
    mean /= static_cast<double>(p);
    for (std::size_t r = 0; r < p; ++r) v(r, c) -= mean;
  }
  DenseMatrix out(p * p, q * q);
  for (std::size_t r1 = 0; r1 < p; ++r1)
    for (std::size_t r2 = 0; r2 < p; ++r2)
      for (std::size_t c1 = 0; c1 < q; ++c1)
        for (std::size_t c2 = 0; c2 < q; ++c2)
          out(r1 * p + r2, c1 * q + c2) = v(r1, c1) * v(r2, c2);
  return normalize_columns(std::move(out));
}

}  // namespace gdl
