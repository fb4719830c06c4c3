#ifndef HMRF_KMEANS_HPP
#define HMRF_KMEANS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "hmrf/error.hpp"
#include "hmrf/grid.hpp"

namespace hmrf {

/// Lower bound applied to every class standard deviation.
inline constexpr double sigma_floor = 1e-4;

struct GaussianClass {
  double mu = 0.0;
  double sigma = 1.0;

  bool operator==(const GaussianClass&) const = default;
};

/// Per-label Gaussian parameters; index is the label.
struct ClassParams {
  std::vector<GaussianClass> classes;

  ClassParams() = default;
  explicit ClassParams(std::vector<GaussianClass> c) : classes(std::move(c)) {}

  int size() const noexcept { return static_cast<int>(classes.size()); }
  const GaussianClass& operator[](Label l) const { return classes[static_cast<std::size_t>(l)]; }
  GaussianClass& operator[](Label l) { return classes[static_cast<std::size_t>(l)]; }

  bool operator==(const ClassParams&) const = default;
};

inline void validate_params(const ClassParams& params, int k) {
  if (params.size() != k) {
    throw Error(ErrorKind::config, "expected " + std::to_string(k) +
                                       " class parameters, got " +
                                       std::to_string(params.size()));
  }
  for (const auto& c : params.classes) {
    if (!std::isfinite(c.mu) || !std::isfinite(c.sigma) || c.sigma < sigma_floor) {
      throw Error(ErrorKind::config, "class parameters must be finite with sigma >= sigma_floor");
    }
  }
}

struct KmeansOptions {
  int max_iters = 100;
  /// Extra randomly seeded runs; the lowest within-cluster sum of squares wins.
  int restarts = 0;
  std::uint64_t seed = 0;
};

struct KmeansResult {
  LabelField labels;
  ClassParams params;
  int iterations = 0;
  /// Within-cluster sum of squares after each update step of the kept run.
  std::vector<double> wcss;
};

namespace detail {

struct LloydRun {
  std::vector<Label> assign;
  std::vector<double> centers;
  std::vector<double> wcss;
  int iterations = 0;
};

// Nearest center; ties go to the lower index.
inline Label nearest_center(double v, const std::vector<double>& centers) {
  Label best = 0;
  double best_d = std::abs(v - centers[0]);
  for (std::size_t c = 1; c < centers.size(); ++c) {
    const double d = std::abs(v - centers[c]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<Label>(c);
    }
  }
  return best;
}

inline LloydRun lloyd(std::span<const double> values, std::vector<double> centers,
                      int max_iters) {
  const std::size_t k = centers.size();
  LloydRun run;
  run.assign.assign(values.size(), -1);
  for (int it = 0; it < max_iters; ++it) {
    bool changed = false;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const Label c = nearest_center(values[i], centers);
      if (c != run.assign[i]) {
        run.assign[i] = c;
        changed = true;
      }
    }
    if (!changed) break;
    run.iterations = it + 1;

    std::vector<double> sum(k, 0.0);
    std::vector<std::size_t> count(k, 0);
    for (std::size_t i = 0; i < values.size(); ++i) {
      sum[run.assign[i]] += values[i];
      ++count[run.assign[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (count[c] > 0) centers[c] = sum[c] / static_cast<double>(count[c]);
    }
    double wcss = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double d = values[i] - centers[run.assign[i]];
      wcss += d * d;
    }
    run.wcss.push_back(wcss);

    // Empty clusters move to the value farthest from its nearest center.
    for (std::size_t c = 0; c < k; ++c) {
      if (count[c] > 0) continue;
      double far_d = 0.0;
      std::size_t far_i = 0;
      for (std::size_t i = 0; i < values.size(); ++i) {
        const double d = std::abs(values[i] - centers[nearest_center(values[i], centers)]);
        if (d > far_d) {
          far_d = d;
          far_i = i;
        }
      }
      if (far_d > 0.0) centers[c] = values[far_i];
    }
  }
  run.centers = std::move(centers);
  return run;
}

inline double run_wcss(const LloydRun& run) {
  return run.wcss.empty() ? std::numeric_limits<double>::infinity() : run.wcss.back();
}

}  // namespace detail

/// Lloyd's algorithm on scalar intensities. Centers start at the
/// (i + 0.5) / k quantiles; labels are renumbered so that mu is
/// non-decreasing in the label. Sigmas are population standard deviations
/// floored at sigma_floor.
inline KmeansResult kmeans_init(const GrayImage& img, int k,
                                const KmeansOptions& opts = {}) {
  if (k < 1) {
    throw Error(ErrorKind::config, "k must be at least 1");
  }
  if (img.empty()) {
    throw Error(ErrorKind::config, "zero-dimension image");
  }
  if (static_cast<std::size_t>(k) > img.size()) {
    throw Error(ErrorKind::config, "k larger than number of pixels");
  }
  if (opts.max_iters < 1 || opts.restarts < 0) {
    throw Error(ErrorKind::config, "invalid k-means iteration settings");
  }

  const auto values = img.data();
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();

  std::vector<double> centers(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    const auto idx = static_cast<std::size_t>((i + 0.5) * static_cast<double>(n) / k);
    centers[static_cast<std::size_t>(i)] = sorted[std::min(idx, n - 1)];
  }
  detail::LloydRun best = detail::lloyd(values, centers, opts.max_iters);

  std::mt19937_64 rng(opts.seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (int r = 0; r < opts.restarts; ++r) {
    for (auto& c : centers) c = sorted[pick(rng)];
    std::sort(centers.begin(), centers.end());
    detail::LloydRun run = detail::lloyd(values, centers, opts.max_iters);
    if (detail::run_wcss(run) < detail::run_wcss(best)) best = std::move(run);
  }

  // Renumber by center; stable so equal centers keep index order.
  std::vector<Label> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Label a, Label b) {
    return best.centers[a] < best.centers[b];
  });
  std::vector<Label> rank(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) rank[order[i]] = i;

  std::vector<Label> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = rank[best.assign[i]];

  std::vector<double> sum(k, 0.0), sq(k, 0.0);
  std::vector<std::size_t> count(k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    sum[labels[i]] += values[i];
    ++count[labels[i]];
  }
  ClassParams params(std::vector<GaussianClass>(static_cast<std::size_t>(k)));
  for (int l = 0; l < k; ++l) {
    params[l].mu = count[l] > 0 ? sum[l] / static_cast<double>(count[l])
                                : best.centers[order[l]];
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double d = values[i] - params[labels[i]].mu;
    sq[labels[i]] += d * d;
  }
  for (int l = 0; l < k; ++l) {
    const double var = count[l] > 0 ? sq[l] / static_cast<double>(count[l]) : 0.0;
    params[l].sigma = std::max(std::sqrt(var), sigma_floor);
  }

  return {LabelField(img.width(), img.height(), k, std::move(labels)),
          std::move(params), best.iterations, std::move(best.wcss)};
}

inline KmeansResult kmeans_init(const GrayImage& img, int k, int max_iters,
                                std::uint64_t seed) {
  return kmeans_init(img, k, KmeansOptions{max_iters, 0, seed});
}

}  // namespace hmrf

#endif  // HMRF_KMEANS_HPP
