#pragma once

// Grayscale images, the corruption models, and the patch pipeline.
//
// Randomness in apply_noise flows from one seed through documented
// substreams: stream 0 drives the Gaussian component, stream 1 the
// salt-and-pepper component. Pixels are visited in row-major order.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "gdl/errors.hpp"
#include "gdl/matrix.hpp"
#include "gdl/rng.hpp"

namespace gdl {

struct GrayImage {
  std::size_t height = 0, width = 0;
  std::vector<double> pixels;  // row-major

  GrayImage() = default;
  GrayImage(std::size_t h, std::size_t w) : height(h), width(w), pixels(h * w, 0.0) {}

  double at(std::size_t r, std::size_t c) const { return pixels[r * width + c]; }
  double& at(std::size_t r, std::size_t c) { return pixels[r * width + c]; }
};

// delta: peak deviation of the nonhomogeneous ramp (at the upper-left corner)
// sigma: deviation of homogeneous Gaussian noise
// p_percent: percentage of pixels hit by salt-and-pepper
// The four corruption models are delta alone, p alone, sigma+p, delta+p;
// delta and sigma never combine.
struct NoiseSpec {
  double delta = 0.0;
  double sigma = 0.0;
  double p_percent = 0.0;

  void validate() const {
    if (delta < 0.0 || sigma < 0.0 || p_percent < 0.0 || p_percent > 100.0)
      throw InvalidArgument("noise spec out of range");
    if (delta > 0.0 && sigma > 0.0)
      throw InvalidArgument("nonhomogeneous and homogeneous Gaussian noise are exclusive");
  }
};

// Ramp deviation: delta at pixel (0,0), decaying linearly to 0 at the
// lower-right corner along rows and columns.
inline double ramp_sigma(std::size_t r, std::size_t c, std::size_t height,
                         std::size_t width, double delta) {
  const double denom = static_cast<double>(height - 1) + static_cast<double>(width - 1);
  if (denom == 0.0) return 0.0;
  const double num = static_cast<double>(height - 1 - r) + static_cast<double>(width - 1 - c);
  return delta * num / denom;
}

// Applies spec to a copy of the image. Gaussian components add (no clipping
// unless asked); salt-and-pepper picks round(p% of the pixels) distinct
// pixels and sets each to 0 or 255 on a fair coin.
inline GrayImage apply_noise(const GrayImage& img, const NoiseSpec& spec,
                             std::uint64_t seed, bool clip = false) {
  spec.validate();
  GrayImage out = img;
  const std::size_t h = img.height, w = img.width;

  if (spec.delta > 0.0 || spec.sigma > 0.0) {
    Rng gauss(Rng::derive_seed(seed, 0));
    for (std::size_t r = 0; r < h; ++r)
      for (std::size_t c = 0; c < w; ++c) {
        const double s =
            spec.delta > 0.0 ? ramp_sigma(r, c, h, w, spec.delta) : spec.sigma;
        if (s > 0.0) out.at(r, c) += s * gauss.normal();
      }
  }

  if (spec.p_percent > 0.0) {
    Rng sp(Rng::derive_seed(seed, 1));
    const auto total = static_cast<std::uint64_t>(h * w);
    const auto count = static_cast<std::uint64_t>(
        std::llround(spec.p_percent / 100.0 * static_cast<double>(total)));
    std::unordered_set<std::uint64_t> hit;
    hit.reserve(static_cast<std::size_t>(count) * 2);
    while (hit.size() < count) {
      const std::uint64_t pos = sp.below(total);
      if (!hit.insert(pos).second) continue;
      out.pixels[static_cast<std::size_t>(pos)] = (sp.next_u64() & 1u) ? 255.0 : 0.0;
    }
  }

  if (clip)
    for (double& v : out.pixels) v = std::min(255.0, std::max(0.0, v));
  return out;
}

struct PatchGrid {
  std::size_t patch_side = 0;
  std::size_t stride = 0;
  // top-left corners in extraction order (row-major over the grid)
  std::vector<std::pair<std::size_t, std::size_t>> origins;
};

// Every patch whose top-left corner lies on the stride grid; each patch is
// one column, flattened row-major.
inline std::pair<DenseMatrix, PatchGrid> extract_patches(const GrayImage& img,
                                                         std::size_t patch_side,
                                                         std::size_t stride) {
  if (patch_side == 0) throw InvalidDims("patch_side must be positive");
  if (stride == 0) throw InvalidArgument("stride must be positive");
  if (img.height < patch_side || img.width < patch_side)
    throw ImageTooSmall(std::to_string(img.height) + "x" +
                        std::to_string(img.width) + " image, patch side " +
                        std::to_string(patch_side));
  PatchGrid grid;
  grid.patch_side = patch_side;
  grid.stride = stride;
  for (std::size_t r = 0; r + patch_side <= img.height; r += stride)
    for (std::size_t c = 0; c + patch_side <= img.width; c += stride)
      grid.origins.emplace_back(r, c);

  DenseMatrix p(patch_side * patch_side, grid.origins.size());
  for (std::size_t j = 0; j < grid.origins.size(); ++j) {
    const auto [orow, ocol] = grid.origins[j];
    for (std::size_t pr = 0; pr < patch_side; ++pr)
      for (std::size_t pc = 0; pc < patch_side; ++pc)
        p(pr * patch_side + pc, j) = img.at(orow + pr, ocol + pc);
  }
  return {std::move(p), std::move(grid)};
}

// Averages overlapping patch estimates per pixel. Pixels no patch covers are
// copied from `fallback`; without one they throw.
inline GrayImage reconstruct_from_patches(const DenseMatrix& patches,
                                          const PatchGrid& grid,
                                          std::size_t height, std::size_t width,
                                          const GrayImage* fallback = nullptr) {
  const std::size_t side = grid.patch_side;
  if (patches.rows() != side * side)
    throw DimensionMismatch("reconstruct: patch rows vs patch_side^2");
  if (patches.cols() != grid.origins.size())
    throw DimensionMismatch("reconstruct: patch count vs grid");
  if (fallback && (fallback->height != height || fallback->width != width))
    throw DimensionMismatch("reconstruct: fallback image dims");

  GrayImage out(height, width);
  std::vector<std::uint32_t> cover(height * width, 0);
  for (std::size_t j = 0; j < grid.origins.size(); ++j) {
    const auto [orow, ocol] = grid.origins[j];
    if (orow + side > height || ocol + side > width)
      throw DimensionMismatch("reconstruct: grid exceeds image");
    for (std::size_t pr = 0; pr < side; ++pr)
      for (std::size_t pc = 0; pc < side; ++pc) {
        out.at(orow + pr, ocol + pc) += patches(pr * side + pc, j);
        ++cover[(orow + pr) * width + ocol + pc];
      }
  }
  for (std::size_t i = 0; i < out.pixels.size(); ++i) {
    if (cover[i] > 0) {
      out.pixels[i] /= static_cast<double>(cover[i]);
    } else if (fallback) {
      out.pixels[i] = fallback->pixels[i];
    } else {
      throw UncoveredPixel("pixel " + std::to_string(i / width) + "," +
                           std::to_string(i % width) +
                           " not covered by any patch");
    }
  }
  return out;
}

}  // namespace gdl
