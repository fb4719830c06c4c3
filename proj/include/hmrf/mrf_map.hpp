#ifndef HMRF_MRF_MAP_HPP
#define HMRF_MRF_MAP_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "hmrf/error.hpp"
#include "hmrf/grid.hpp"
#include "hmrf/kmeans.hpp"

namespace hmrf {

enum class IcmSchedule {
  sequential,   ///< raster order, neighbors read from the evolving field
  synchronous,  ///< every pixel reads the field frozen at the sweep start
};

/// How an edge map decouples neighbor pairs.
enum class EdgeCoupling {
  /// A pair interacts only if neither pixel is an edge. Matches prior_energy,
  /// so each ICM update is an exact coordinate descent step.
  symmetric,
  /// Updating pixel i ignores neighbor j only when j is an edge pixel.
  one_sided,
};

struct IcmConfig {
  int max_iters = 10;
  /// Absolute change in total energy between sweeps that counts as converged.
  double energy_tol = 1e-6;
  IcmSchedule schedule = IcmSchedule::sequential;
  EdgeCoupling coupling = EdgeCoupling::symmetric;
};

struct EnergyBreakdown {
  double likelihood = 0.0;
  double prior = 0.0;
  double total = 0.0;
};

struct IcmResult {
  LabelField labels;
  /// Entry 0 is the energy of the initial field, then one entry per sweep.
  std::vector<EnergyBreakdown> history;
  int sweeps = 0;
};

/// (y - mu_l)^2 / (2 sigma_l^2) + ln sigma_l
inline double likelihood_energy_pixel(double y, Label l, const ClassParams& params) {
  const GaussianClass& c = params[l];
  const double d = y - c.mu;
  return d * d / (2.0 * c.sigma * c.sigma) + std::log(c.sigma);
}

/// Potts pair potential: 0 for equal labels, 1/2 otherwise.
constexpr double clique_potential(Label a, Label b) noexcept {
  return a == b ? 0.0 : 0.5;
}

namespace detail {

inline bool is_edge(const EdgeMap* edges, std::size_t i) {
  return edges != nullptr && (*edges)[i] != 0;
}

// Whether pixel i's update counts its neighbor j.
inline bool coupled(const EdgeMap* edges, std::size_t i, std::size_t j,
                    EdgeCoupling coupling) {
  if (edges == nullptr) return true;
  if (coupling == EdgeCoupling::one_sided) return (*edges)[j] == 0;
  return (*edges)[i] == 0 && (*edges)[j] == 0;
}

// Up to four 4-neighbors of pixel i; returns the count written to `out`.
inline int neighbors4(std::size_t i, std::size_t width, std::size_t height,
                      std::size_t out[4]) {
  const std::size_t x = i % width;
  const std::size_t y = i / width;
  int n = 0;
  if (y > 0) out[n++] = i - width;
  if (x > 0) out[n++] = i - 1;
  if (x + 1 < width) out[n++] = i + 1;
  if (y + 1 < height) out[n++] = i + width;
  return n;
}

inline void check_inputs(const GrayImage& img, const LabelField& labels,
                         const ClassParams& params, const EdgeMap* edges) {
  require_same_shape(img, labels, "label field");
  if (edges != nullptr) require_same_shape(img, *edges, "edge map");
  validate_params(params, labels.num_classes());
}

// Row-major table of likelihood_energy_pixel(y_i, l) with stride k.
inline std::vector<double> likelihood_table(const GrayImage& img,
                                            const ClassParams& params) {
  const auto k = static_cast<std::size_t>(params.size());
  std::vector<double> table(img.size() * k);
  for (std::size_t i = 0; i < img.size(); ++i) {
    for (std::size_t l = 0; l < k; ++l) {
      table[i * k + l] = likelihood_energy_pixel(img[i], static_cast<Label>(l), params);
    }
  }
  return table;
}

}  // namespace detail

/// Sum of pair potentials over 4-neighbor pairs, each unordered pair once.
/// Pairs touching an edge pixel contribute nothing.
inline double prior_energy(const LabelField& labels, const EdgeMap* edges = nullptr) {
  if (edges != nullptr) require_same_shape(labels, *edges, "edge map");
  const std::size_t w = labels.width();
  const std::size_t h = labels.height();
  double u = 0.0;
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const std::size_t i = y * w + x;
      if (detail::is_edge(edges, i)) continue;
      if (x + 1 < w && !detail::is_edge(edges, i + 1)) {
        u += clique_potential(labels[i], labels[i + 1]);
      }
      if (y + 1 < h && !detail::is_edge(edges, i + w)) {
        u += clique_potential(labels[i], labels[i + w]);
      }
    }
  }
  return u;
}

inline EnergyBreakdown total_posterior_energy(const GrayImage& img,
                                              const LabelField& labels,
                                              const ClassParams& params,
                                              const EdgeMap* edges = nullptr) {
  detail::check_inputs(img, labels, params, edges);
  EnergyBreakdown e;
  for (std::size_t i = 0; i < img.size(); ++i) {
    e.likelihood += likelihood_energy_pixel(img[i], labels[i], params);
  }
  e.prior = prior_energy(labels, edges);
  e.total = e.likelihood + e.prior;
  return e;
}

/// Per-pixel maximum-likelihood labels (argmin of the likelihood energy,
/// ties to the smaller label).
inline LabelField ml_labels(const GrayImage& img, const ClassParams& params) {
  const int k = params.size();
  validate_params(params, k);
  LabelField out(img.width(), img.height(), k);
  for (std::size_t i = 0; i < img.size(); ++i) {
    Label best = 0;
    double best_e = likelihood_energy_pixel(img[i], 0, params);
    for (Label l = 1; l < k; ++l) {
      const double e = likelihood_energy_pixel(img[i], l, params);
      if (e < best_e) {
        best_e = e;
        best = l;
      }
    }
    out[i] = best;
  }
  return out;
}

/// Iterated conditional modes on U(y|x) + U(x). Each sweep sets every pixel
/// to the label minimizing its likelihood energy plus the pair potentials
/// with its coupled neighbors; ties go to the smallest label. Stops when the
/// total energy changes by at most cfg.energy_tol or after cfg.max_iters
/// sweeps.
inline IcmResult icm_map(const GrayImage& img, const LabelField& labels_init,
                         const ClassParams& params, const EdgeMap* edges,
                         const IcmConfig& cfg = {}) {
  detail::check_inputs(img, labels_init, params, edges);
  if (cfg.max_iters < 1 || !(cfg.energy_tol >= 0.0)) {
    throw Error(ErrorKind::config, "invalid ICM configuration");
  }
  const std::size_t w = img.width();
  const std::size_t h = img.height();
  const auto k = static_cast<std::size_t>(params.size());
  const std::vector<double> like = detail::likelihood_table(img, params);

  IcmResult result{labels_init, {}, 0};
  LabelField& x = result.labels;
  result.history.push_back(total_posterior_energy(img, x, params, edges));

  LabelField frozen;
  std::vector<double> cost(k);
  for (int sweep = 0; sweep < cfg.max_iters; ++sweep) {
    if (cfg.schedule == IcmSchedule::synchronous) frozen = x;
    const LabelField& read = cfg.schedule == IcmSchedule::synchronous ? frozen : x;

    for (std::size_t i = 0; i < img.size(); ++i) {
      for (std::size_t l = 0; l < k; ++l) cost[l] = like[i * k + l];
      std::size_t nb[4];
      const int n = detail::neighbors4(i, w, h, nb);
      for (int a = 0; a < n; ++a) {
        if (!detail::coupled(edges, i, nb[a], cfg.coupling)) continue;
        const Label xj = read[nb[a]];
        for (std::size_t l = 0; l < k; ++l) {
          cost[l] += clique_potential(static_cast<Label>(l), xj);
        }
      }
      std::size_t best = 0;
      for (std::size_t l = 1; l < k; ++l) {
        if (cost[l] < cost[best]) best = l;
      }
      x[i] = static_cast<Label>(best);
    }

    result.sweeps = sweep + 1;
    result.history.push_back(total_posterior_energy(img, x, params, edges));
    const double delta = result.history.back().total -
                         result.history[result.history.size() - 2].total;
    if (std::abs(delta) <= cfg.energy_tol) break;
  }
  return result;
}

}  // namespace hmrf

#endif  // HMRF_MRF_MAP_HPP
