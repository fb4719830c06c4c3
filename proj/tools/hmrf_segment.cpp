// Edge-prior-preserving HMRF-EM segmentation of a grayscale image.
//
//   hmrf_segment --input photo.png --out-dir result
//
// writes labels_init.pgm, labels_final.pgm, blurred.pgm, edges.pgm and
// energy.csv into the output directory.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hmrf/error.hpp"
#include "hmrf/pipeline.hpp"

int main(int argc, char** argv) {
  hmrf::PipelineConfig cfg;
  std::string input;
  std::string out_dir = ".";
  std::string edge = "canny";
  std::string schedule = "sequential";
  std::string kmeans_input = "blurred";

  CLI::App app{"HMRF-EM image segmentation"};
  app.add_option("--input", input, "Input image (P5 PGM or PNG)")->required();
  app.add_option("--k", cfg.k, "Number of classes")->capture_default_str();
  app.add_option("--em-iters", cfg.em_iters, "EM iterations")->capture_default_str();
  app.add_option("--map-iters", cfg.map_iters, "ICM sweeps per EM iteration")
      ->capture_default_str();
  app.add_option("--blur-sigma", cfg.blur_sigma, "Gaussian blur sigma for the observation")
      ->capture_default_str();
  app.add_option("--blur-kernel-size", cfg.blur_kernel_size,
                 "Odd blur kernel size (0: smallest odd >= 6 sigma)")
      ->capture_default_str();
  app.add_option("--edge", edge, "Edge source: canny | none | file:<path>")
      ->capture_default_str();
  app.add_option("--canny-sigma", cfg.canny.sigma)->capture_default_str();
  app.add_option("--canny-low", cfg.canny.low, "Low threshold, fraction of max magnitude")
      ->capture_default_str();
  app.add_option("--canny-high", cfg.canny.high, "High threshold, fraction of max magnitude")
      ->capture_default_str();
  app.add_option("--icm-schedule", schedule, "sequential | synchronous")
      ->capture_default_str();
  app.add_flag("--edge-literal", cfg.edge_literal,
               "Only drop neighbors that are edge pixels (one-sided masking)");
  app.add_option("--kmeans-input", kmeans_input, "blurred | original")
      ->check(CLI::IsMember({"blurred", "original"}))
      ->capture_default_str();
  app.add_option("--kmeans-restarts", cfg.kmeans_restarts,
                 "Additional randomly seeded k-means runs")
      ->capture_default_str();
  app.add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
  app.add_option("--seed", cfg.seed, "Seed for k-means restarts")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    cfg.input_path = input;
    cfg.out_dir = out_dir;
    cfg.edge_mode = hmrf::parse_edge_mode(edge);
    cfg.icm_schedule = hmrf::parse_schedule(schedule);
    cfg.kmeans_on_original = kmeans_input == "original";
  } catch (const hmrf::Error& e) {
    std::cerr << "error (" << hmrf::to_string(e.kind()) << "): " << e.what() << '\n';
    return hmrf::exit_code(e.kind());
  }
  return hmrf::run_pipeline(cfg, std::cout, std::cerr);
}
