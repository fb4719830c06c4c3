#ifndef HMRF_GRID_HPP
#define HMRF_GRID_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hmrf/error.hpp"

namespace hmrf {

/// Dense row-major 2D grid. Pixel (x, y) lives at index y * width + x.
template <typename T>
class Grid {
 public:
  using value_type = T;

  Grid() = default;

  Grid(std::size_t width, std::size_t height, T fill = T{})
      : width_(width), height_(height), data_(width * height, fill) {}

  Grid(std::size_t width, std::size_t height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (data_.size() != width_ * height_) {
      throw Error(ErrorKind::dimension, "grid data length does not match " +
                                            std::to_string(width_) + "x" +
                                            std::to_string(height_));
    }
  }

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t x, std::size_t y) { return data_[y * width_ + x]; }
  const T& operator()(std::size_t x, std::size_t y) const {
    return data_[y * width_ + x];
  }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }
  const std::vector<T>& values() const noexcept { return data_; }

  template <typename U>
  bool same_shape(const Grid<U>& other) const noexcept {
    return width_ == other.width() && height_ == other.height();
  }

  bool operator==(const Grid&) const = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<T> data_;
};

/// Observation y. Intensities are nominally in [0, 1].
using GrayImage = Grid<double>;

/// Binary edge mask z; nonzero marks an edge pixel.
using EdgeMap = Grid<std::uint8_t>;

using Label = int;

/// Label configuration x over a grid, with labels in [0, num_classes).
class LabelField : public Grid<Label> {
 public:
  LabelField() = default;

  LabelField(std::size_t width, std::size_t height, int num_classes,
             Label fill = 0)
      : Grid<Label>(width, height, fill), num_classes_(num_classes) {
    check();
  }

  LabelField(std::size_t width, std::size_t height, int num_classes,
             std::vector<Label> labels)
      : Grid<Label>(width, height, std::move(labels)),
        num_classes_(num_classes) {
    check();
  }

  int num_classes() const noexcept { return num_classes_; }

  bool operator==(const LabelField&) const = default;

 private:
  void check() const {
    if (num_classes_ < 1) {
      throw Error(ErrorKind::config, "number of classes must be at least 1");
    }
    for (Label l : data()) {
      if (l < 0 || l >= num_classes_) {
        throw Error(ErrorKind::config, "label " + std::to_string(l) +
                                           " outside [0, " +
                                           std::to_string(num_classes_) + ")");
      }
    }
  }

  int num_classes_ = 0;
};

/// Throws unless every intensity is finite and inside [0, 1].
inline void validate_intensities(const GrayImage& img) {
  if (img.empty()) {
    throw Error(ErrorKind::config, "zero-dimension image");
  }
  for (double v : img.data()) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw Error(ErrorKind::config, "intensity outside [0, 1]");
    }
  }
}

template <typename T, typename U>
void require_same_shape(const Grid<T>& a, const Grid<U>& b, const char* what) {
  if (!a.same_shape(b)) {
    throw Error(ErrorKind::dimension, std::string(what) + " dimension mismatch");
  }
}

}  // namespace hmrf

#endif  // HMRF_GRID_HPP
