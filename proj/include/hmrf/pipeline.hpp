#ifndef HMRF_PIPELINE_HPP
#define HMRF_PIPELINE_HPP

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <string>
#include <system_error>

#include "hmrf/edges.hpp"
#include "hmrf/error.hpp"
#include "hmrf/grid.hpp"
#include "hmrf/hmrf_em.hpp"
#include "hmrf/image.hpp"
#include "hmrf/io.hpp"
#include "hmrf/kmeans.hpp"
#include "hmrf/mrf_map.hpp"

namespace hmrf {

enum class EdgeSource { canny, file, none };

struct EdgeMode {
  EdgeSource source = EdgeSource::canny;
  std::filesystem::path path;  // only for EdgeSource::file
};

/// Parses `canny`, `none` or `file:<path>`.
inline EdgeMode parse_edge_mode(const std::string& text) {
  if (text == "canny") return {EdgeSource::canny, {}};
  if (text == "none") return {EdgeSource::none, {}};
  constexpr std::string_view prefix = "file:";
  if (text.size() > prefix.size() && text.compare(0, prefix.size(), prefix) == 0) {
    return {EdgeSource::file, text.substr(prefix.size())};
  }
  throw Error(ErrorKind::config, "invalid edge mode '" + text + "'");
}

inline IcmSchedule parse_schedule(const std::string& text) {
  if (text == "sequential") return IcmSchedule::sequential;
  if (text == "synchronous") return IcmSchedule::synchronous;
  throw Error(ErrorKind::config, "invalid ICM schedule '" + text + "'");
}

struct PipelineConfig {
  std::filesystem::path input_path;
  std::filesystem::path out_dir = ".";
  int k = 2;
  int em_iters = 10;
  int map_iters = 10;
  double blur_sigma = 3.0;
  int blur_kernel_size = 0;  // 0: derived from blur_sigma
  EdgeMode edge_mode;
  CannyParams canny;
  IcmSchedule icm_schedule = IcmSchedule::sequential;
  bool edge_literal = false;
  /// Cluster the blurred observation (default) or the original image.
  bool kmeans_on_original = false;
  int kmeans_max_iters = 100;
  int kmeans_restarts = 0;
  std::uint64_t seed = 0;
};

struct PipelineResult {
  GrayImage original;
  GrayImage observation;
  std::optional<EdgeMap> edges;
  KmeansResult init;
  EmResult em;
  double elapsed_ms = 0.0;
};

inline void validate(const PipelineConfig& cfg) {
  if (cfg.k < 1) throw Error(ErrorKind::config, "k must be at least 1");
  if (cfg.em_iters < 1) throw Error(ErrorKind::config, "em-iters must be at least 1");
  if (cfg.map_iters < 1) throw Error(ErrorKind::config, "map-iters must be at least 1");
  if (!(cfg.blur_sigma > 0.0)) throw Error(ErrorKind::config, "blur-sigma must be positive");
  if (cfg.blur_kernel_size < 0 ||
      (cfg.blur_kernel_size > 0 && cfg.blur_kernel_size % 2 == 0)) {
    throw Error(ErrorKind::config, "blur kernel size must be odd");
  }
  if (cfg.edge_mode.source == EdgeSource::canny) detail::check_canny_params(cfg.canny);
}

/// Blur, detect edges, initialize with k-means and run HMRF-EM on an image
/// already in memory. cfg.input_path is ignored.
inline PipelineResult segment(GrayImage original, const PipelineConfig& cfg,
                              std::chrono::steady_clock::time_point start =
                                  std::chrono::steady_clock::now()) {
  validate(cfg);
  PipelineResult r;
  r.original = std::move(original);
  r.observation = gaussian_blur(r.original, cfg.blur_sigma,
                                BlurOptions{cfg.blur_kernel_size, true});

  switch (cfg.edge_mode.source) {
    case EdgeSource::canny:
      r.edges = canny_edges(r.original, cfg.canny);
      break;
    case EdgeSource::file:
      r.edges = load_edge_map(cfg.edge_mode.path, r.original.width(), r.original.height());
      break;
    case EdgeSource::none:
      break;
  }

  r.init = kmeans_init(cfg.kmeans_on_original ? r.original : r.observation, cfg.k,
                       KmeansOptions{cfg.kmeans_max_iters, cfg.kmeans_restarts, cfg.seed});

  EmConfig em;
  em.em_iters = cfg.em_iters;
  em.icm.max_iters = cfg.map_iters;
  em.icm.schedule = cfg.icm_schedule;
  em.icm.coupling = cfg.edge_literal ? EdgeCoupling::one_sided : EdgeCoupling::symmetric;
  em.record_trace = true;
  r.em = hmrf_em(r.observation, r.init.labels, r.init.params,
                 r.edges ? &*r.edges : nullptr, em);

  r.elapsed_ms = std::chrono::duration<double, std::milli>(
                     std::chrono::steady_clock::now() - start)
                     .count();
  return r;
}

/// Load cfg.input_path and segment it. Writes nothing; see run_pipeline for
/// the file-producing driver.
inline PipelineResult segment(const PipelineConfig& cfg) {
  validate(cfg);
  const auto start = std::chrono::steady_clock::now();
  return segment(load_image(cfg.input_path), cfg, start);
}

/// Writes labels_init.pgm, labels_final.pgm, blurred.pgm, edges.pgm (when an
/// edge map is in use) and energy.csv into cfg.out_dir.
inline void write_outputs(const PipelineConfig& cfg, const PipelineResult& r) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) {
    throw Error(ErrorKind::io, "cannot create output directory '" +
                                   cfg.out_dir.string() + "': " + ec.message());
  }
  save_label_image(r.init.labels, cfg.k, cfg.out_dir / "labels_init.pgm");
  save_label_image(r.em.labels, cfg.k, cfg.out_dir / "labels_final.pgm");
  save_gray_image(r.observation, cfg.out_dir / "blurred.pgm");
  if (r.edges) save_edge_map(*r.edges, cfg.out_dir / "edges.pgm");

  const auto csv_path = cfg.out_dir / "energy.csv";
  std::ofstream csv(csv_path, std::ios::trunc);
  if (!csv) throw Error(ErrorKind::io, "cannot write '" + csv_path.string() + "'");
  r.em.trace.write_csv(csv);
  if (!csv) throw Error(ErrorKind::io, "write failed for '" + csv_path.string() + "'");
}

/// Full CLI behavior. Returns the process exit status; errors are reported
/// as one line on `err`.
inline int run_pipeline(const PipelineConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const PipelineResult r = segment(cfg);
    write_outputs(cfg, r);
    const auto old_precision = out.precision();
    out << std::setprecision(10);
    for (const TraceEntry& e : r.em.trace.entries) {
      out << "em " << e.iteration << " total " << e.total << " likelihood "
          << e.likelihood << " prior " << e.prior << '\n';
    }
    out << std::fixed << std::setprecision(1) << "elapsed_ms " << r.elapsed_ms << '\n';
    out.unsetf(std::ios::floatfield);
    out.precision(old_precision);
    return 0;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace hmrf

#endif  // HMRF_PIPELINE_HPP
