#pragma once

// Small dense kernels used by the solvers. Everything here works on supports
// of at most a few dozen indices or on skinny matrices, so plain loops are
// fine.

#include <cmath>
#include <cstddef>
#include <vector>

#include "gdl/matrix.hpp"

namespace gdl::detail {

// In-place Cholesky factorization of a row-major k x k SPD matrix.
// Returns false on a non-positive pivot instead of throwing.
inline bool cholesky_factor(std::vector<double>& g, std::size_t k) {
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = g[i * k + j];
      for (std::size_t p = 0; p < j; ++p) s -= g[i * k + p] * g[j * k + p];
      if (i == j) {
        if (s <= 0.0 || !std::isfinite(s)) return false;
        g[i * k + i] = std::sqrt(s);
      } else {
        g[i * k + j] = s / g[j * k + j];
      }
    }
  }
  return true;
}

// Solves L L^T x = b with L from cholesky_factor; b is overwritten with x.
inline void cholesky_solve(const std::vector<double>& l, std::size_t k,
                           std::vector<double>& b) {
  for (std::size_t i = 0; i < k; ++i) {
    double s = b[i];
    for (std::size_t p = 0; p < i; ++p) s -= l[i * k + p] * b[p];
    b[i] = s / l[i * k + i];
  }
  for (std::size_t ii = k; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t p = ii + 1; p < k; ++p) s -= l[p * k + ii] * b[p];
    b[ii] = s / l[ii * k + ii];
  }
}

// Least squares of x against the dictionary columns listed in `support`,
// via normal equations. A singular Gram matrix falls back to a 1e-12 ridge.
// Returns the coefficients (aligned with `support`) and fills residual_sq
// with ||x - D_S a||^2 when requested.
inline std::vector<double> least_squares_on_support(
    const DenseMatrix& d_mat, const double* x,
    const std::vector<std::size_t>& support, double* residual_sq = nullptr) {
  const std::size_t d = d_mat.rows();
  const std::size_t k = support.size();
  std::vector<double> coeffs(k, 0.0);
  if (k > 0) {
    std::vector<double> gram(k * k, 0.0);
    std::vector<double> rhs(k, 0.0);
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = a; b < k; ++b) {
        double s = 0.0;
        for (std::size_t r = 0; r < d; ++r)
          s += d_mat(r, support[a]) * d_mat(r, support[b]);
        gram[a * k + b] = s;
        gram[b * k + a] = s;
      }
      double s = 0.0;
      for (std::size_t r = 0; r < d; ++r) s += d_mat(r, support[a]) * x[r];
      rhs[a] = s;
    }
    std::vector<double> fac = gram;
    if (!cholesky_factor(fac, k)) {
      fac = gram;
      for (std::size_t a = 0; a < k; ++a) fac[a * k + a] += 1e-12;
      if (!cholesky_factor(fac, k))
        throw SingularGram("support Gram matrix singular even with ridge");
    }
    coeffs = rhs;
    cholesky_solve(fac, k, coeffs);
  }
  if (residual_sq) {
    double s = 0.0;
    for (std::size_t r = 0; r < d; ++r) {
      double e = x[r];
      for (std::size_t a = 0; a < k; ++a) e -= coeffs[a] * d_mat(r, support[a]);
      s += e * e;
    }
    *residual_sq = s;
  }
  return coeffs;
}

// Least squares on a support via modified Gram-Schmidt QR. Deliberately a
// different numerical path from least_squares_on_support; the brute-force
// oracles use this one so they stay independent of the solver they check.
inline std::vector<double> least_squares_mgs(
    const DenseMatrix& d_mat, const double* x,
    const std::vector<std::size_t>& support, double* residual_sq = nullptr) {
  const std::size_t d = d_mat.rows();
  const std::size_t k = support.size();
  // Q columns in place, R upper triangular.
  std::vector<double> q(d * k, 0.0);
  std::vector<double> r(k * k, 0.0);
  std::vector<std::size_t> kept;  // columns with nonzero remainder
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t row = 0; row < d; ++row)
      q[row * k + j] = d_mat(row, support[j]);
    for (std::size_t p : kept) {
      double s = 0.0;
      for (std::size_t row = 0; row < d; ++row)
        s += q[row * k + p] * q[row * k + j];
      r[p * k + j] = s;
      for (std::size_t row = 0; row < d; ++row) q[row * k + j] -= s * q[row * k + p];
    }
    double norm = 0.0;
    for (std::size_t row = 0; row < d; ++row)
      norm += q[row * k + j] * q[row * k + j];
    norm = std::sqrt(norm);
    if (norm > 1e-12) {
      r[j * k + j] = norm;
      for (std::size_t row = 0; row < d; ++row) q[row * k + j] /= norm;
      kept.push_back(j);
    } else {
      r[j * k + j] = 0.0;  // dependent column, coefficient forced to zero
      for (std::size_t row = 0; row < d; ++row) q[row * k + j] = 0.0;
    }
  }
  // coeffs solve R a = Q^T x over the kept columns, back substitution.
  std::vector<double> qtx(k, 0.0);
  for (std::size_t j : kept) {
    double s = 0.0;
    for (std::size_t row = 0; row < d; ++row) s += q[row * k + j] * x[row];
    qtx[j] = s;
  }
  std::vector<double> coeffs(k, 0.0);
  for (std::size_t idx = kept.size(); idx-- > 0;) {
    const std::size_t j = kept[idx];
    double s = qtx[j];
    for (std::size_t p = idx + 1; p < kept.size(); ++p)
      s -= r[j * k + kept[p]] * coeffs[kept[p]];
    coeffs[j] = s / r[j * k + j];
  }
  if (residual_sq) {
    double s = 0.0;
    for (std::size_t row = 0; row < d; ++row) {
      double e = x[row];
      for (std::size_t j = 0; j < k; ++j) e -= coeffs[j] * d_mat(row, support[j]);
      s += e * e;
    }
    *residual_sq = s;
  }
  return coeffs;
}

// Leading eigenpair of a small symmetric PSD matrix (row-major k x k) by
// power iteration, run until the eigenvalue moves by <= tol relatively.
// Start vector is pinned for determinism.
inline double leading_eig_sym(const std::vector<double>& g, std::size_t k,
                              std::vector<double>& eigvec,
                              double tol = 1e-12) {
  eigvec.assign(k, 0.0);
  double norm = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    eigvec[i] = 1.0 + 1e-3 * static_cast<double>(i);
    norm += eigvec[i] * eigvec[i];
  }
  norm = std::sqrt(norm);
  for (double& v : eigvec) v /= norm;
  std::vector<double> next(k);
  double lambda = 0.0;
  for (std::size_t it = 0; it < 100000; ++it) {
    for (std::size_t i = 0; i < k; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < k; ++j) s += g[i * k + j] * eigvec[j];
      next[i] = s;
    }
    double lam = 0.0;
    for (std::size_t i = 0; i < k; ++i) lam += next[i] * eigvec[i];
    double nn = 0.0;
    for (double v : next) nn += v * v;
    nn = std::sqrt(nn);
    if (nn < 1e-300) return 0.0;  // matrix is (numerically) zero
    for (std::size_t i = 0; i < k; ++i) eigvec[i] = next[i] / nn;
    if (it > 0 && std::abs(lam - lambda) <= tol * std::max(std::abs(lam), 1.0)) {
      lambda = lam;
      break;
    }
    lambda = lam;
  }
  return lambda;
}

// Leading singular triple of a dense d x n matrix by alternating power
// iteration, warm-started at u0 (unit d-vector). Returns sigma and fills
// u (d) and v (n). Each half step is the optimal update for the other
// factor, so sigma never decreases across iterations.
inline double rank1_svd_warm(const DenseMatrix& e, std::vector<double>& u,
                             std::vector<double>& v, double tol = 1e-12) {
  const std::size_t d = e.rows(), n = e.cols();
  v.assign(n, 0.0);
  double sigma = 0.0;
  for (std::size_t it = 0; it < 100000; ++it) {
    // v <- E^T u, normalized
    std::fill(v.begin(), v.end(), 0.0);
    for (std::size_t r = 0; r < d; ++r) {
      const double ur = u[r];
      const double* row = e.row_ptr(r);
      for (std::size_t c = 0; c < n; ++c) v[c] += ur * row[c];
    }
    double vn = 0.0;
    for (double x : v) vn += x * x;
    vn = std::sqrt(vn);
    if (vn < 1e-300) return 0.0;
    for (double& x : v) x /= vn;
    // u <- E v, sigma = ||E v||
    std::fill(u.begin(), u.end(), 0.0);
    for (std::size_t r = 0; r < d; ++r) {
      const double* row = e.row_ptr(r);
      double s = 0.0;
      for (std::size_t c = 0; c < n; ++c) s += row[c] * v[c];
      u[r] = s;
    }
    double un = 0.0;
    for (double x : u) un += x * x;
    un = std::sqrt(un);
    if (un < 1e-300) return 0.0;
    for (double& x : u) x /= un;
    if (it > 0 && std::abs(un - sigma) <= tol * std::max(un, 1.0)) {
      sigma = un;
      break;
    }
    sigma = un;
  }
  return sigma;
}

}  // namespace gdl::detail
