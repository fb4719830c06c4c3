#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>
#include <string>

#include "hmrf/pipeline.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;

namespace {

std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (char c : text) n += c == '\n';
  return n;
}

hmrf::PipelineConfig coffee_config(const std::string& out) {
  hmrf::PipelineConfig cfg;
  cfg.input_path = test_util::data_dir() / "coffee_600x338.pgm";
  cfg.out_dir = test_util::temp_dir() / out;
  return cfg;
}

}  // namespace

TEST(ParseEdgeMode, Variants) {
  EXPECT_EQ(hmrf::parse_edge_mode("canny").source, hmrf::EdgeSource::canny);
  EXPECT_EQ(hmrf::parse_edge_mode("none").source, hmrf::EdgeSource::none);
  const auto f = hmrf::parse_edge_mode("file:/tmp/e.pgm");
  EXPECT_EQ(f.source, hmrf::EdgeSource::file);
  EXPECT_EQ(f.path, fs::path("/tmp/e.pgm"));
  EXPECT_THROW(hmrf::parse_edge_mode("file:"), hmrf::Error);
  EXPECT_THROW(hmrf::parse_edge_mode("sobel"), hmrf::Error);
  EXPECT_EQ(hmrf::parse_schedule("synchronous"), hmrf::IcmSchedule::synchronous);
  EXPECT_THROW(hmrf::parse_schedule("random"), hmrf::Error);
}

TEST(RunPipeline, DefaultsWriteAllOutputs) {
  const auto cfg = coffee_config("defaults");
  std::ostringstream out, err;
  ASSERT_EQ(hmrf::run_pipeline(cfg, out, err), 0) << err.str();
  for (const char* name : {"labels_init.pgm", "labels_final.pgm", "blurred.pgm", "edges.pgm",
                           "energy.csv"}) {
    EXPECT_TRUE(fs::exists(cfg.out_dir / name)) << name;
  }
  const std::string csv = test_util::read_all(cfg.out_dir / "energy.csv");
  EXPECT_EQ(count_lines(csv), 11u);  // header + 10 iterations
  EXPECT_NE(out.str().find("em 10 total"), std::string::npos);
  EXPECT_NE(out.str().find("elapsed_ms"), std::string::npos);

  const auto labels = hmrf::load_pgm_bytes(cfg.out_dir / "labels_final.pgm");
  EXPECT_EQ(labels.width(), 600u);
  EXPECT_EQ(labels.height(), 338u);
  for (auto v : labels.data()) EXPECT_TRUE(v == 0 || v == 255);
}

TEST(RunPipeline, Deterministic) {
  auto a = coffee_config("det_a");
  auto b = coffee_config("det_b");
  a.em_iters = b.em_iters = 3;
  std::ostringstream out, err;
  ASSERT_EQ(hmrf::run_pipeline(a, out, err), 0);
  ASSERT_EQ(hmrf::run_pipeline(b, out, err), 0);
  for (const char* name : {"labels_init.pgm", "labels_final.pgm", "blurred.pgm", "edges.pgm",
                           "energy.csv"}) {
    EXPECT_EQ(test_util::read_all(a.out_dir / name), test_util::read_all(b.out_dir / name))
        << name;
  }
}

TEST(RunPipeline, ConstantImageGivesSingleClass) {
  const auto input = test_util::write_temp("flat.pgm", "P5\n20 10\n255\n" + std::string(200, '\x50'));
  hmrf::PipelineConfig cfg;
  cfg.input_path = input;
  cfg.out_dir = test_util::temp_dir() / "flat";
  cfg.edge_mode = hmrf::parse_edge_mode("none");
  std::ostringstream out, err;
  ASSERT_EQ(hmrf::run_pipeline(cfg, out, err), 0) << err.str();
  EXPECT_FALSE(fs::exists(cfg.out_dir / "edges.pgm"));
  const auto labels = hmrf::load_pgm_bytes(cfg.out_dir / "labels_final.pgm");
  for (auto v : labels.data()) EXPECT_EQ(v, labels[0]);
}

TEST(RunPipeline, EdgeFileDimensionMismatch) {
  auto cfg = coffee_config("mismatch");
  const auto edge = test_util::write_temp("small_edges.pgm", "P5\n3 3\n255\n" + std::string(9, '\0'));
  cfg.edge_mode = hmrf::parse_edge_mode("file:" + edge.string());
  std::ostringstream out, err;
  const int status = hmrf::run_pipeline(cfg, out, err);
  EXPECT_NE(status, 0);
  EXPECT_EQ(status, hmrf::exit_code(hmrf::ErrorKind::dimension));
  EXPECT_NE(err.str().find("edge map dimension mismatch"), std::string::npos) << err.str();
  EXPECT_EQ(count_lines(err.str()), 1u);
}

TEST(RunPipeline, EdgeFileUsedVerbatim) {
  auto cfg = coffee_config("edge_file");
  cfg.em_iters = 2;
  hmrf::EdgeMap edges(600, 338, 0);
  for (std::size_t x = 0; x < 600; ++x) edges(x, 100) = 1;
  const auto path = test_util::temp_dir() / "line_edges.pgm";
  hmrf::save_edge_map(edges, path);
  cfg.edge_mode = hmrf::parse_edge_mode("file:" + path.string());
  std::ostringstream out, err;
  ASSERT_EQ(hmrf::run_pipeline(cfg, out, err), 0) << err.str();
  EXPECT_EQ(hmrf::load_edge_map(cfg.out_dir / "edges.pgm", 600, 338), edges);
}

TEST(RunPipeline, ErrorClasses) {
  std::ostringstream out, err;
  hmrf::PipelineConfig missing;
  missing.input_path = test_util::temp_dir() / "nope.pgm";
  missing.out_dir = test_util::temp_dir() / "nope";
  EXPECT_EQ(hmrf::run_pipeline(missing, out, err), hmrf::exit_code(hmrf::ErrorKind::io));

  auto bad = coffee_config("bad");
  bad.k = 0;
  EXPECT_EQ(hmrf::run_pipeline(bad, out, err), hmrf::exit_code(hmrf::ErrorKind::config));
  bad = coffee_config("bad");
  bad.canny.low = 0.5;
  bad.canny.high = 0.2;
  EXPECT_EQ(hmrf::run_pipeline(bad, out, err), hmrf::exit_code(hmrf::ErrorKind::config));

  const auto junk = test_util::write_temp("junk.pgm", "hello");
  bad = coffee_config("bad");
  bad.input_path = junk;
  EXPECT_EQ(hmrf::run_pipeline(bad, out, err), hmrf::exit_code(hmrf::ErrorKind::format));
}

TEST(RunPipeline, ScheduleAndLiteralModesRun) {
  auto cfg = coffee_config("modes");
  cfg.em_iters = 2;
  cfg.icm_schedule = hmrf::IcmSchedule::synchronous;
  cfg.edge_literal = true;
  cfg.kmeans_on_original = true;
  cfg.k = 3;
  std::ostringstream out, err;
  ASSERT_EQ(hmrf::run_pipeline(cfg, out, err), 0) << err.str();
  const auto labels = hmrf::load_pgm_bytes(cfg.out_dir / "labels_final.pgm");
  for (auto v : labels.data()) EXPECT_TRUE(v == 0 || v == 128 || v == 255);
}
