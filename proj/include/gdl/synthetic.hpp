#pragma once

// Synthetic ground-truth generator: a random unit-column dictionary, sparse
// coefficients in one of two placement modes, and Gaussian measurement noise.
//
// Substreams of the one seed (documented key split): 0 dictionary, 1
// coefficients, 2 noise. The dictionary is drawn column by column; sparse
// positions are drawn first (rejection sampling), sorted ascending by
// (column, row), and only then receive their normal values in that order;
// noise is added signal by signal.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <tuple>
#include <unordered_set>
#include <utility>
#include <vector>

#include "gdl/errors.hpp"
#include "gdl/matrix.hpp"
#include "gdl/rng.hpp"

namespace gdl {

struct SyntheticSpec {
  std::size_t dim = 20;       // signal dimension d
  std::size_t atoms = 50;     // dictionary size m
  std::size_t signals = 1500; // number of signals n

  enum class Sparsity { PerColumn, TotalNnz };
  Sparsity mode = Sparsity::PerColumn;
  std::size_t sparsity = 3;  // nonzeros per column, or total nonzeros

  double sigma = 0.0;  // additive Gaussian noise deviation
};

struct SyntheticData {
  DenseMatrix dictionary;         // d x m, unit columns
  SparseCoeffMatrix coefficients; // m x n
  DenseMatrix clean;              // dictionary * coefficients
  DenseMatrix noisy;              // clean + sigma * N(0,1); == clean if sigma 0
};

namespace detail {

// count distinct cells of an m x n grid, uniformly, as sorted (col, row)
// pairs. Cell ids are col * m + row so the sort groups by column.
inline std::vector<std::pair<std::size_t, std::size_t>> sample_cells(
    std::size_t m, std::size_t n, std::size_t count, Rng& rng) {
  const std::uint64_t total = static_cast<std::uint64_t>(m) * n;
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(count * 2);
  std::vector<std::uint64_t> ids;
  ids.reserve(count);
  while (ids.size() < count) {
    const std::uint64_t id = rng.below(total);
    if (seen.insert(id).second) ids.push_back(id);
  }
  std::sort(ids.begin(), ids.end());
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  cells.reserve(count);
  for (std::uint64_t id : ids)
    cells.emplace_back(static_cast<std::size_t>(id / m),
                       static_cast<std::size_t>(id % m));  // (col, row)
  return cells;
}

}  // namespace detail

inline SyntheticData gen_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
  if (spec.dim == 0 || spec.atoms == 0 || spec.signals == 0)
    throw InvalidDims("gen_synthetic: dimensions must be positive");
  if (spec.sigma < 0.0) throw InvalidArgument("gen_synthetic: negative sigma");
  const std::size_t d = spec.dim, m = spec.atoms, n = spec.signals;

  Rng dict_rng(Rng::derive_seed(seed, 0));
  DenseMatrix dict(d, m);
  for (std::size_t c = 0; c < m; ++c)
    for (std::size_t r = 0; r < d; ++r) dict(r, c) = dict_rng.normal();
  dict = normalize_columns(std::move(dict));

  Rng coeff_rng(Rng::derive_seed(seed, 1));
  std::size_t budget = 0;
  std::vector<std::tuple<std::size_t, std::size_t, double>> trips;
  if (spec.mode == SyntheticSpec::Sparsity::PerColumn) {
    if (spec.sparsity > m)
      throw InvalidArgument("gen_synthetic: per-column sparsity exceeds atoms");
    budget = spec.sparsity * n;
    std::vector<std::size_t> rows;
    std::vector<char> used(m, 0);
    for (std::size_t c = 0; c < n; ++c) {
      rows.clear();
      while (rows.size() < spec.sparsity) {
        const auto r = static_cast<std::size_t>(coeff_rng.below(m));
        if (!used[r]) {
          used[r] = 1;
          rows.push_back(r);
        }
      }
      std::sort(rows.begin(), rows.end());
      for (std::size_t r : rows) {
        used[r] = 0;
        trips.emplace_back(r, c, coeff_rng.normal());
      }
    }
  } else {
    if (spec.sparsity > m * n)
      throw BudgetTooLarge("gen_synthetic: total nonzeros exceed matrix size");
    budget = spec.sparsity;
    for (const auto& [col, row] :
         detail::sample_cells(m, n, spec.sparsity, coeff_rng))
      trips.emplace_back(row, col, coeff_rng.normal());
  }
  auto coeffs = SparseCoeffMatrix::from_triplets(m, n, budget, trips);

  DenseMatrix clean(d, n);
  for (std::size_t c = 0; c < n; ++c)
    for (const auto& [row, val] : coeffs.column(c))
      for (std::size_t r = 0; r < d; ++r) clean(r, c) += val * dict(r, row);

  DenseMatrix noisy = clean;
  if (spec.sigma > 0.0) {
    Rng noise_rng(Rng::derive_seed(seed, 2));
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t r = 0; r < d; ++r)
        noisy(r, c) += spec.sigma * noise_rng.normal();
  }

  return {std::move(dict), std::move(coeffs), std::move(clean), std::move(noisy)};
}

}  // namespace gdl
