#ifndef HMRF_HMRF_EM_HPP
#define HMRF_HMRF_EM_HPP

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <span>
#include <vector>

#include "hmrf/error.hpp"
#include "hmrf/grid.hpp"
#include "hmrf/kmeans.hpp"
#include "hmrf/mrf_map.hpp"

namespace hmrf {

struct EmConfig {
  int em_iters = 10;
  IcmConfig icm;
  /// Record the per-iteration energy trace and the ICM sweep histories.
  bool record_trace = true;
};

/// Class posteriors p(l | y_i), stored row-major with one row of k
/// probabilities per pixel.
class PosteriorField {
 public:
  PosteriorField() = default;
  PosteriorField(std::size_t width, std::size_t height, int k)
      : width_(width), height_(height), k_(k),
        p_(width * height * static_cast<std::size_t>(k), 0.0) {}

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t pixels() const noexcept { return width_ * height_; }
  int num_classes() const noexcept { return k_; }

  double& operator()(std::size_t i, Label l) { return p_[index(i, l)]; }
  double operator()(std::size_t i, Label l) const { return p_[index(i, l)]; }

  std::span<double> row(std::size_t i) {
    return std::span<double>(p_).subspan(i * static_cast<std::size_t>(k_),
                                         static_cast<std::size_t>(k_));
  }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(p_).subspan(i * static_cast<std::size_t>(k_),
                                               static_cast<std::size_t>(k_));
  }

 private:
  std::size_t index(std::size_t i, Label l) const {
    return i * static_cast<std::size_t>(k_) + static_cast<std::size_t>(l);
  }

  std::size_t width_ = 0;
  std::size_t height_ = 0;
  int k_ = 0;
  std::vector<double> p_;
};

struct TraceEntry {
  int iteration = 0;
  double total = 0.0;
  double likelihood = 0.0;
  double prior = 0.0;
};

struct EnergyTrace {
  std::vector<TraceEntry> entries;

  /// CSV with header `iter,total,likelihood,prior`; iterations count from 1.
  void write_csv(std::ostream& out) const {
    const auto old_flags = out.flags();
    const auto old_precision = out.precision();
    out << "iter,total,likelihood,prior\n";
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (const TraceEntry& e : entries) {
      out << e.iteration << ',' << e.total << ',' << e.likelihood << ',' << e.prior
          << '\n';
    }
    out.flags(old_flags);
    out.precision(old_precision);
  }
};

struct EmResult {
  LabelField labels;
  ClassParams params;
  EnergyTrace trace;
  /// ICM energy history of each EM iteration's MAP step.
  std::vector<std::vector<EnergyBreakdown>> icm_histories;
};

inline double gaussian_pdf(double z, double mu, double sigma) {
  const double d = z - mu;
  return std::exp(-d * d / (2.0 * sigma * sigma)) /
         std::sqrt(2.0 * std::numbers::pi * sigma * sigma);
}

namespace detail {

inline double log_gaussian_pdf(double z, double mu, double sigma) {
  const double d = z - mu;
  return -d * d / (2.0 * sigma * sigma) - std::log(sigma) -
         0.5 * std::log(2.0 * std::numbers::pi);
}

// Sum of pair potentials between label l at pixel i and its coupled neighbors.
inline double neighborhood_energy(const LabelField& labels, std::size_t i, Label l,
                                  const EdgeMap* edges, EdgeCoupling coupling) {
  std::size_t nb[4];
  const int n = neighbors4(i, labels.width(), labels.height(), nb);
  double u = 0.0;
  for (int a = 0; a < n; ++a) {
    if (coupled(edges, i, nb[a], coupling)) u += clique_potential(l, labels[nb[a]]);
  }
  return u;
}

}  // namespace detail

/// Unnormalized neighborhood prior weight exp(-sum of pair potentials).
inline double neighborhood_label_prior(const LabelField& labels, std::size_t i, Label l,
                                       const EdgeMap* edges = nullptr,
                                       EdgeCoupling coupling = EdgeCoupling::symmetric) {
  if (i >= labels.size() || l < 0 || l >= labels.num_classes()) {
    throw Error(ErrorKind::config, "pixel index or label out of range");
  }
  if (edges != nullptr) require_same_shape(labels, *edges, "edge map");
  return std::exp(-detail::neighborhood_energy(labels, i, l, edges, coupling));
}

/// p(l | y_i) proportional to G(y_i; theta_l) * P(l | neighborhood of i),
/// normalized per pixel. Evaluated in log space with a per-pixel max shift.
inline PosteriorField class_posterior(const GrayImage& img, const LabelField& labels,
                                      const ClassParams& params,
                                      const EdgeMap* edges = nullptr,
                                      EdgeCoupling coupling = EdgeCoupling::symmetric) {
  detail::check_inputs(img, labels, params, edges);
  const int k = params.size();
  PosteriorField post(img.width(), img.height(), k);
  std::vector<double> logp(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < img.size(); ++i) {
    double peak = -std::numeric_limits<double>::infinity();
    for (Label l = 0; l < k; ++l) {
      const double v = detail::log_gaussian_pdf(img[i], params[l].mu, params[l].sigma) -
                       detail::neighborhood_energy(labels, i, l, edges, coupling);
      logp[static_cast<std::size_t>(l)] = v;
      peak = std::max(peak, v);
    }
    auto row = post.row(i);
    double sum = 0.0;
    for (std::size_t l = 0; l < row.size(); ++l) {
      row[l] = std::exp(logp[l] - peak);
      sum += row[l];
    }
    if (!(sum > 0.0) || !std::isfinite(sum)) {
      for (double& p : row) p = 1.0 / k;
    } else {
      for (double& p : row) p /= sum;
    }
  }
  return post;
}

/// Posterior-weighted mean and population variance per class. A class with
/// zero total weight keeps its previous parameters. Sigma is floored at
/// sigma_floor and mu is kept inside the observed intensity range.
inline ClassParams update_parameters(const GrayImage& img, const PosteriorField& post,
                                     const ClassParams& previous) {
  if (post.width() != img.width() || post.height() != img.height()) {
    throw Error(ErrorKind::dimension, "posterior field dimension mismatch");
  }
  const int k = post.num_classes();
  if (previous.size() != k) {
    throw Error(ErrorKind::config, "previous parameters do not match class count");
  }
  if (img.empty()) {
    throw Error(ErrorKind::config, "zero-dimension image");
  }
  const auto [lo, hi] = std::minmax_element(img.data().begin(), img.data().end());

  ClassParams next = previous;
  for (Label l = 0; l < k; ++l) {
    double weight = 0.0;
    double first = 0.0;
    for (std::size_t i = 0; i < img.size(); ++i) {
      weight += post(i, l);
      first += post(i, l) * img[i];
    }
    if (!(weight > 0.0)) continue;
    const double mu = std::clamp(first / weight, *lo, *hi);
    double second = 0.0;
    for (std::size_t i = 0; i < img.size(); ++i) {
      const double d = img[i] - mu;
      second += post(i, l) * d * d;
    }
    next[l].mu = mu;
    next[l].sigma = std::max(std::sqrt(second / weight), sigma_floor);
  }
  return next;
}

/// EM loop: each iteration runs ICM with the current parameters, computes
/// class posteriors from the new labels, re-estimates the parameters, and
/// records the total energy of the new labels under the new parameters.
inline EmResult hmrf_em(const GrayImage& img, const LabelField& labels_init,
                        const ClassParams& params_init, const EdgeMap* edges,
                        const EmConfig& cfg = {}) {
  detail::check_inputs(img, labels_init, params_init, edges);
  if (cfg.em_iters < 1) {
    throw Error(ErrorKind::config, "em_iters must be at least 1");
  }
  EmResult result{labels_init, params_init, {}, {}};
  for (int t = 0; t < cfg.em_iters; ++t) {
    IcmResult map = icm_map(img, result.labels, result.params, edges, cfg.icm);
    result.labels = std::move(map.labels);
    const PosteriorField post =
        class_posterior(img, result.labels, result.params, edges, cfg.icm.coupling);
    result.params = update_parameters(img, post, result.params);
    if (cfg.record_trace) {
      const EnergyBreakdown e =
          total_posterior_energy(img, result.labels, result.params, edges);
      result.trace.entries.push_back({t + 1, e.total, e.likelihood, e.prior});
      result.icm_histories.push_back(std::move(map.history));
    }
  }
  return result;
}

}  // namespace hmrf

#endif  // HMRF_HMRF_EM_HPP
