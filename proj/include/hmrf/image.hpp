#ifndef HMRF_IMAGE_HPP
#define HMRF_IMAGE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "hmrf/error.hpp"
#include "hmrf/grid.hpp"

namespace hmrf {

namespace detail {

// Source index for each position of a 1D axis of length n after `pad`
// successive one-pixel mirror expansions. Each expansion prepends a copy of
// the element one step inside the current first element and appends the one
// step inside the current last element; a length-1 axis copies itself.
inline std::vector<std::size_t> mirror_index_map(std::size_t n,
                                                 std::size_t pad) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t p = 0; p < pad; ++p) {
    std::vector<std::size_t> next;
    next.reserve(idx.size() + 2);
    next.push_back(idx.size() > 1 ? idx[1] : idx[0]);
    next.insert(next.end(), idx.begin(), idx.end());
    next.push_back(idx.size() > 1 ? idx[idx.size() - 2] : idx.back());
    idx = std::move(next);
  }
  return idx;
}

template <typename T>
Grid<T> mirror_pad(const Grid<T>& img, std::size_t pad) {
  const auto xs = mirror_index_map(img.width(), pad);
  const auto ys = mirror_index_map(img.height(), pad);
  Grid<T> out(xs.size(), ys.size());
  for (std::size_t y = 0; y < ys.size(); ++y) {
    for (std::size_t x = 0; x < xs.size(); ++x) {
      out(x, y) = img(xs[x], ys[y]);
    }
  }
  return out;
}

}  // namespace detail

/// Adds a one-pixel border; each border pixel copies the pixel one step
/// inside the image along the axis being mirrored.
template <typename T>
Grid<T> mirror_expand(const Grid<T>& img) {
  if (img.empty()) {
    throw Error(ErrorKind::config, "zero-dimension image");
  }
  return detail::mirror_pad(img, 1);
}

/// Inverse of mirror_expand: drops the one-pixel border.
template <typename T>
Grid<T> mirror_shrink(const Grid<T>& img) {
  if (img.width() < 3 || img.height() < 3) {
    throw Error(ErrorKind::config, "image too small");
  }
  Grid<T> out(img.width() - 2, img.height() - 2);
  for (std::size_t y = 0; y < out.height(); ++y) {
    for (std::size_t x = 0; x < out.width(); ++x) {
      out(x, y) = img(x + 1, y + 1);
    }
  }
  return out;
}

struct GaussianKernel {
  int size = 1;
  double sigma = 1.0;
  Grid<double> weights;

  int radius() const noexcept { return size / 2; }
};

/// Smallest odd integer >= 6 * sigma; always at least 1.
inline int gaussian_kernel_size(double sigma) {
  int size = static_cast<int>(std::ceil(6.0 * sigma));
  if (size < 1) size = 1;
  if (size % 2 == 0) ++size;
  return size;
}

/// Normalized 2D Gaussian mask of explicit odd `size`.
inline GaussianKernel gaussian_kernel(double sigma, int size) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorKind::config, "gaussian sigma must be positive");
  }
  if (size < 1 || size % 2 == 0) {
    throw Error(ErrorKind::config, "gaussian kernel size must be odd and positive");
  }
  const int r = size / 2;
  GaussianKernel k{size, sigma, Grid<double>(size, size)};
  const double denom = 2.0 * sigma * sigma;
  double total = 0.0;
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      const double w = std::exp(-static_cast<double>(dx * dx + dy * dy) / denom);
      k.weights(dx + r, dy + r) = w;
      total += w;
    }
  }
  for (double& w : k.weights.data()) w /= total;
  return k;
}

inline GaussianKernel gaussian_kernel(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorKind::config, "gaussian sigma must be positive");
  }
  return gaussian_kernel(sigma, gaussian_kernel_size(sigma));
}

struct BlurOptions {
  /// 0 selects gaussian_kernel_size(sigma).
  int kernel_size = 0;
  /// Clamp output to [min(input), max(input)] to absorb rounding.
  bool clamp_to_input_range = true;
};

/// Convolves with a Gaussian kernel after mirror padding to the kernel radius.
/// Output has the input's dimensions.
inline GrayImage convolve_mirrored(const GrayImage& img,
                                   const GaussianKernel& kernel,
                                   bool clamp_to_input_range = true) {
  if (img.empty()) {
    throw Error(ErrorKind::config, "zero-dimension image");
  }
  const auto r = static_cast<std::size_t>(kernel.radius());
  const auto n = static_cast<std::size_t>(kernel.size);
  const GrayImage padded = detail::mirror_pad(img, r);
  const auto& w = kernel.weights;

  GrayImage out(img.width(), img.height());
  for (std::size_t y = 0; y < img.height(); ++y) {
    for (std::size_t x = 0; x < img.width(); ++x) {
      double acc = 0.0;
      for (std::size_t ky = 0; ky < n; ++ky) {
        const double* row = &padded(x, y + ky);
        const double* wrow = &w(0, ky);
        for (std::size_t kx = 0; kx < n; ++kx) acc += wrow[kx] * row[kx];
      }
      out(x, y) = acc;
    }
  }

  if (clamp_to_input_range) {
    const auto [lo, hi] = std::minmax_element(img.data().begin(), img.data().end());
    for (double& v : out.data()) v = std::clamp(v, *lo, *hi);
  }
  return out;
}

inline GrayImage gaussian_blur(const GrayImage& img, double sigma,
                               const BlurOptions& opts = {}) {
  const GaussianKernel kernel = opts.kernel_size > 0
                                    ? gaussian_kernel(sigma, opts.kernel_size)
                                    : gaussian_kernel(sigma);
  return convolve_mirrored(img, kernel, opts.clamp_to_input_range);
}

}  // namespace hmrf

#endif  // HMRF_IMAGE_HPP
