#pragma once

// Evaluation metrics: dictionary recovery, representation error, PSNR, and
// the per-pixel atom-usage map.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "gdl/errors.hpp"
#include "gdl/image.hpp"
#include "gdl/matrix.hpp"

namespace gdl {

// 1 - max_j |d_true . d_hat_j|, clamped into [0,1]. Sign- and
// permutation-invariant by construction; assumes unit-norm inputs.
inline double atom_recovery_distance(const std::vector<double>& d_true,
                                     const DenseMatrix& d_hat) {
  if (d_hat.cols() == 0) throw EmptyDictionary("no learned atoms");
  if (d_hat.rows() != d_true.size())
    throw DimensionMismatch("atom_recovery_distance: dimension mismatch");
  double best = 0.0;
  for (std::size_t c = 0; c < d_hat.cols(); ++c) {
    double dot = 0.0;
    for (std::size_t r = 0; r < d_hat.rows(); ++r) dot += d_true[r] * d_hat(r, c);
    best = std::max(best, std::abs(dot));
  }
  const double dist = 1.0 - best;
  return std::min(1.0, std::max(0.0, dist));
}

// Fraction of true atoms whose recovery distance is strictly below the
// threshold. Matching is with replacement: one learned atom may cover
// several true atoms.
inline double dictionary_recovery_rate(const DenseMatrix& d_true,
                                       const DenseMatrix& d_hat,
                                       double threshold = 0.01) {
  if (d_true.cols() == 0) throw EmptyDictionary("no true atoms");
  if (d_true.rows() != d_hat.rows())
    throw DimensionMismatch("dictionary_recovery_rate: dimension mismatch");
  std::size_t recovered = 0;
  std::vector<double> atom(d_true.rows());
  for (std::size_t c = 0; c < d_true.cols(); ++c) {
    for (std::size_t r = 0; r < d_true.rows(); ++r) atom[r] = d_true(r, c);
    if (atom_recovery_distance(atom, d_hat) < threshold) ++recovered;
  }
  return static_cast<double>(recovered) / static_cast<double>(d_true.cols());
}

// Mean over signals of ||x_hat_i - x_i||2 / sqrt(d).
inline double representation_error(const DenseMatrix& x_ref,
                                   const DenseMatrix& x_hat) {
  if (x_ref.rows() != x_hat.rows() || x_ref.cols() != x_hat.cols())
    throw DimensionMismatch("representation_error: shape mismatch");
  if (x_ref.cols() == 0 || x_ref.rows() == 0)
    throw InvalidDims("representation_error: empty matrix");
  const double root_d = std::sqrt(static_cast<double>(x_ref.rows()));
  double total = 0.0;
  for (std::size_t c = 0; c < x_ref.cols(); ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < x_ref.rows(); ++r) {
      const double e = x_hat(r, c) - x_ref(r, c);
      s += e * e;
    }
    total += std::sqrt(s) / root_d;
  }
  return total / static_cast<double>(x_ref.cols());
}

// 10 log10(255^2 / mean squared error); identical images give +infinity.
inline double psnr(const GrayImage& ref, const GrayImage& test) {
  if (ref.height != test.height || ref.width != test.width)
    throw DimensionMismatch("psnr: shape mismatch");
  if (ref.pixels.empty()) throw InvalidDims("psnr: empty image");
  double mse = 0.0;
  for (std::size_t i = 0; i < ref.pixels.size(); ++i) {
    const double e = ref.pixels[i] - test.pixels[i];
    mse += e * e;
  }
  mse /= static_cast<double>(ref.pixels.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

// Per-pixel mean, over the patches covering the pixel, of the covering
// patch's coefficient count. Throws if any pixel is uncovered.
inline GrayImage atom_usage_raw(const SparseCoeffMatrix& a, const PatchGrid& grid,
                                std::size_t height, std::size_t width) {
  if (a.cols() != grid.origins.size())
    throw DimensionMismatch("atom_usage: one coefficient column per patch");
  const std::size_t side = grid.patch_side;
  GrayImage sum(height, width);
  std::vector<std::uint32_t> cover(height * width, 0);
  for (std::size_t j = 0; j < grid.origins.size(); ++j) {
    const auto [orow, ocol] = grid.origins[j];
    if (orow + side > height || ocol + side > width)
      throw DimensionMismatch("atom_usage: grid exceeds image");
    const auto nnz = static_cast<double>(a.column_nnz(j));
    for (std::size_t pr = 0; pr < side; ++pr)
      for (std::size_t pc = 0; pc < side; ++pc) {
        sum.at(orow + pr, ocol + pc) += nnz;
        ++cover[(orow + pr) * width + ocol + pc];
      }
  }
  for (std::size_t i = 0; i < sum.pixels.size(); ++i) {
    if (cover[i] == 0)
      throw UncoveredPixel("pixel " + std::to_string(i / width) + "," +
                           std::to_string(i % width) + " not covered");
    sum.pixels[i] /= static_cast<double>(cover[i]);
  }
  return sum;
}

// The raw usage map rescaled linearly so its minimum maps to 0 and its
// maximum to 255; a constant map comes back all zeros.
inline GrayImage atom_usage_map(const SparseCoeffMatrix& a, const PatchGrid& grid,
                                std::size_t height, std::size_t width) {
  GrayImage raw = atom_usage_raw(a, grid, height, width);
  double lo = raw.pixels[0], hi = raw.pixels[0];
  for (double v : raw.pixels) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double span = hi - lo;
  if (span < 1e-12) {
    for (double& v : raw.pixels) v = 0.0;
  } else {
    for (double& v : raw.pixels) v = (v - lo) / span * 255.0;
  }
  return raw;
}

// Ordered metric name/value pairs, as written to metrics CSV files.
struct MetricsReport {
  std::vector<std::pair<std::string, double>> values;
  void add(const std::string& name, double value) { values.emplace_back(name, value); }
};

}  // namespace gdl
