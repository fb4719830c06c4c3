#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "hmrf/io.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using hmrf::Error;
using hmrf::ErrorKind;

namespace {

void expect_error(const fs::path& path, ErrorKind kind, const std::string& what) {
  try {
    hmrf::load_image(path);
    FAIL() << "expected an error loading " << path;
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), kind);
    EXPECT_EQ(std::string(e.what()).rfind(what, 0), 0u) << e.what();
  }
}

}  // namespace

TEST(LoadImage, ScalesBytes) {
  const auto path = test_util::write_temp("a.pgm", "P5\n2 2\n255\n" + test_util::bytes({0, 255, 128, 64}));
  const auto img = hmrf::load_image(path);
  ASSERT_EQ(img.width(), 2u);
  ASSERT_EQ(img.height(), 2u);
  EXPECT_EQ(img[0], 0.0);
  EXPECT_EQ(img[1], 1.0);
  EXPECT_EQ(img[2], 128.0 / 255.0);
  EXPECT_EQ(img[3], 64.0 / 255.0);
}

TEST(LoadImage, SinglePixel) {
  const auto path = test_util::write_temp("b.pgm", "P5 1 1 255\n" + test_util::bytes({255}));
  const auto img = hmrf::load_image(path);
  ASSERT_EQ(img.size(), 1u);
  EXPECT_EQ(img[0], 1.0);
}

TEST(LoadImage, HeaderComments) {
  const auto path = test_util::write_temp(
      "c.pgm", "P5\n# made by hand\n3 1\n# another\n255\n" + test_util::bytes({10, 20, 30}));
  const auto img = hmrf::load_image(path);
  ASSERT_EQ(img.width(), 3u);
  EXPECT_EQ(img[2], 30.0 / 255.0);
}

TEST(LoadImage, Errors) {
  expect_error(test_util::temp_dir() / "missing.pgm", ErrorKind::io, "cannot open");
  expect_error(test_util::write_temp("t.pgm", "P5\n2 2\n255\n" + test_util::bytes({1, 2, 3})),
               ErrorKind::format, "malformed image body");
  expect_error(test_util::write_temp("h.pgm", "P6\n2 2\n255\n" + test_util::bytes({1, 2, 3, 4})),
               ErrorKind::format, "malformed header");
  expect_error(test_util::write_temp("n.pgm", "P5\n2\n"), ErrorKind::format, "malformed header");
  expect_error(test_util::write_temp("z.pgm", "P5\n0 3\n255\n"), ErrorKind::format,
               "zero-dimension image");
}

#ifdef HMRF_HAVE_PNG
TEST(LoadImage, GrayPng) {
  const auto img = hmrf::load_image(test_util::data_dir() / "gray_2x2.png");
  ASSERT_EQ(img.width(), 2u);
  ASSERT_EQ(img.height(), 2u);
  EXPECT_EQ(img[0], 0.0);
  EXPECT_EQ(img[1], 1.0);
  EXPECT_EQ(img[2], 128.0 / 255.0);
  EXPECT_EQ(img[3], 64.0 / 255.0);
}

TEST(LoadImage, ColorPngAveragesChannels) {
  const auto img = hmrf::load_image(test_util::data_dir() / "rgb_2x1.png");
  ASSERT_EQ(img.width(), 2u);
  ASSERT_EQ(img.height(), 1u);
  EXPECT_DOUBLE_EQ(img[0], 60.0 / 255.0);
  EXPECT_DOUBLE_EQ(img[1], 85.0 / 255.0);
}

TEST(LoadImage, TruncatedPng) {
  const auto full = test_util::read_all(test_util::data_dir() / "rocket_600x338.png");
  const auto path = test_util::write_temp("cut.png", full.substr(0, full.size() / 2));
  try {
    hmrf::load_image(path);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::format);
  }
}
#endif

TEST(SaveLabelImage, TwoClasses) {
  const auto path = test_util::temp_dir() / "l2.pgm";
  hmrf::save_label_image(hmrf::LabelField(2, 1, 2, std::vector<int>{0, 1}), 2, path);
  EXPECT_EQ(test_util::read_all(path), "P5\n2 1\n255\n" + test_util::bytes({0, 255}));
}

TEST(SaveLabelImage, ThreeClasses) {
  const auto path = test_util::temp_dir() / "l3.pgm";
  hmrf::save_label_image(hmrf::LabelField(3, 1, 3, std::vector<int>{0, 1, 2}), 3, path);
  EXPECT_EQ(test_util::read_all(path), "P5\n3 1\n255\n" + test_util::bytes({0, 128, 255}));
}

TEST(SaveLabelImage, SingleClass) {
  const auto path = test_util::temp_dir() / "l1.pgm";
  hmrf::save_label_image(hmrf::LabelField(2, 1, 1, std::vector<int>{0, 0}), 1, path);
  EXPECT_EQ(test_util::read_all(path), "P5\n2 1\n255\n" + test_util::bytes({0, 0}));
}

TEST(SaveLabelImage, UnwritablePath) {
  try {
    hmrf::save_label_image(hmrf::LabelField(1, 1, 2), 2,
                           test_util::temp_dir() / "no_such_dir" / "x.pgm");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::io);
  }
}

TEST(SaveGrayImage, RoundTripsThroughLoad) {
  hmrf::GrayImage img(3, 2, std::vector<double>{0.0, 1.0, 0.5, 0.25, 10.0 / 255.0, 0.999});
  const auto path = test_util::temp_dir() / "g.pgm";
  hmrf::save_gray_image(img, path);
  const auto back = hmrf::load_image(path);
  for (std::size_t i = 0; i < img.size(); ++i) EXPECT_NEAR(back[i], img[i], 0.5 / 255.0 + 1e-12);
}
