#ifndef HMRF_EDGES_HPP
#define HMRF_EDGES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <vector>

#include "hmrf/error.hpp"
#include "hmrf/grid.hpp"
#include "hmrf/image.hpp"
#include "hmrf/io.hpp"

namespace hmrf {

struct CannyParams {
  double sigma = 1.0;
  /// Hysteresis thresholds as fractions of the largest suppressed magnitude.
  double low = 0.1;
  double high = 0.3;
};

namespace detail {

inline void check_canny_params(const CannyParams& p) {
  if (!(p.sigma > 0.0) || !std::isfinite(p.sigma)) {
    throw Error(ErrorKind::config, "canny sigma must be positive");
  }
  if (!(p.low >= 0.0 && p.low < 1.0) || !(p.high > 0.0 && p.high <= 1.0)) {
    throw Error(ErrorKind::config, "canny thresholds outside [0, 1]");
  }
  if (!(p.low < p.high)) {
    throw Error(ErrorKind::config, "threshold ordering violated");
  }
}

/// Gradient magnitude after Gaussian smoothing, central differences and
/// non-maximum suppression across the quantized gradient direction.
/// Suppressed pixels hold 0.
inline Grid<double> suppressed_gradient(const GrayImage& img, double sigma) {
  const GrayImage smooth = gaussian_blur(img, sigma);
  const std::size_t w = img.width();
  const std::size_t h = img.height();
  // One-pixel mirror maps, shifted so that map[x + 1] is the source of x.
  const auto xs = mirror_index_map(w, 1);
  const auto ys = mirror_index_map(h, 1);

  Grid<double> mag(w, h);
  Grid<std::uint8_t> dir(w, h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const double gx = 0.5 * (smooth(xs[x + 2], y) - smooth(xs[x], y));
      const double gy = 0.5 * (smooth(x, ys[y + 2]) - smooth(x, ys[y]));
      mag(x, y) = std::hypot(gx, gy);
      double angle = std::atan2(gy, gx) * 180.0 / std::numbers::pi;
      if (angle < 0.0) angle += 180.0;
      // 0: horizontal gradient, 1: 45 deg, 2: vertical, 3: 135 deg
      std::uint8_t bin = 0;
      if (angle >= 22.5 && angle < 67.5) {
        bin = 1;
      } else if (angle >= 67.5 && angle < 112.5) {
        bin = 2;
      } else if (angle >= 112.5 && angle < 157.5) {
        bin = 3;
      }
      dir(x, y) = bin;
    }
  }

  // Offset of the neighbor in the positive gradient direction (y grows down).
  static constexpr int step_x[4] = {1, 1, 0, -1};
  static constexpr int step_y[4] = {0, 1, 1, 1};
  const auto at = [&](long x, long y) {
    if (x < 0 || y < 0 || x >= static_cast<long>(w) || y >= static_cast<long>(h)) {
      return 0.0;
    }
    return mag(static_cast<std::size_t>(x), static_cast<std::size_t>(y));
  };

  Grid<double> out(w, h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const double m = mag(x, y);
      if (m <= 0.0) continue;
      const int d = dir(x, y);
      const long sx = static_cast<long>(x);
      const long sy = static_cast<long>(y);
      const double behind = at(sx - step_x[d], sy - step_y[d]);
      const double ahead = at(sx + step_x[d], sy + step_y[d]);
      // Half-open comparison: of two equal neighbors across an edge only the
      // one nearer the origin survives, so step edges stay one pixel wide.
      if (m > behind && m >= ahead) out(x, y) = m;
    }
  }
  return out;
}

/// Strong pixels (>= high * max) seed an 8-connected flood through weak
/// pixels (>= low * max). Zero magnitudes are never edges.
inline EdgeMap hysteresis(const Grid<double>& mag, double low, double high) {
  EdgeMap edges(mag.width(), mag.height(), 0);
  if (mag.empty()) return edges;
  const double peak = *std::max_element(mag.data().begin(), mag.data().end());
  if (!(peak > 0.0)) return edges;
  const double lo = low * peak;
  const double hi = high * peak;

  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < mag.size(); ++i) {
    if (mag[i] > 0.0 && mag[i] >= hi) {
      edges[i] = 1;
      stack.push_back(i);
    }
  }
  const long w = static_cast<long>(mag.width());
  const long h = static_cast<long>(mag.height());
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    const long x = static_cast<long>(i) % w;
    const long y = static_cast<long>(i) / w;
    for (long dy = -1; dy <= 1; ++dy) {
      for (long dx = -1; dx <= 1; ++dx) {
        const long nx = x + dx;
        const long ny = y + dy;
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        const auto j = static_cast<std::size_t>(ny * w + nx);
        if (!edges[j] && mag[j] > 0.0 && mag[j] >= lo) {
          edges[j] = 1;
          stack.push_back(j);
        }
      }
    }
  }
  return edges;
}

}  // namespace detail

inline EdgeMap canny_edges(const GrayImage& img, const CannyParams& params) {
  detail::check_canny_params(params);
  if (img.empty()) {
    throw Error(ErrorKind::config, "zero-dimension image");
  }
  return detail::hysteresis(detail::suppressed_gradient(img, params.sigma),
                            params.low, params.high);
}

inline EdgeMap canny_edges(const GrayImage& img, double sigma, double low,
                           double high) {
  return canny_edges(img, CannyParams{sigma, low, high});
}

/// Loads a P5 edge map for a width x height image; bytes >= 128 are edges.
inline EdgeMap load_edge_map(const std::filesystem::path& path,
                             std::size_t width, std::size_t height) {
  const Grid<std::uint8_t> raw = load_pgm_bytes(path);
  if (raw.width() != width || raw.height() != height) {
    throw Error(ErrorKind::dimension, "edge map dimension mismatch");
  }
  EdgeMap edges(width, height, 0);
  for (std::size_t i = 0; i < raw.size(); ++i) edges[i] = raw[i] >= 128 ? 1 : 0;
  return edges;
}

inline void save_edge_map(const EdgeMap& edges, const std::filesystem::path& path) {
  Grid<std::uint8_t> bytes(edges.width(), edges.height());
  for (std::size_t i = 0; i < edges.size(); ++i) bytes[i] = edges[i] ? 255 : 0;
  save_pgm(bytes, path);
}

}  // namespace hmrf

#endif  // HMRF_EDGES_HPP
