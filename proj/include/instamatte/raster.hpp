#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "instamatte/error.hpp"

namespace instamatte {

// Single-plane raster with row-major storage.
template <typename T>
class Plane {
 public:
  Plane() = default;
  Plane(int width, int height, T fill = T{}) : width_(width), height_(height) {
    if (width < 1 || height < 1) {
      throw Error(ErrorCode::InvalidArgument, "raster dimensions must be positive");
    }
    data_.assign(static_cast<std::size_t>(width) * height, fill);
  }
  Plane(int width, int height, std::vector<T> data) : width_(width), height_(height), data_(std::move(data)) {
    if (width < 1 || height < 1) {
      throw Error(ErrorCode::InvalidArgument, "raster dimensions must be positive");
    }
    if (data_.size() != static_cast<std::size_t>(width) * height) {
      throw Error(ErrorCode::DimensionMismatch, "raster data length does not match width x height");
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool contains(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  T& operator()(int x, int y) { return data_[index(x, y)]; }
  const T& operator()(int x, int y) const { return data_[index(x, y)]; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::vector<T>& data() noexcept { return data_; }
  const std::vector<T>& data() const noexcept { return data_; }

  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  template <typename U>
  bool same_shape(const Plane<U>& other) const noexcept {
    return width_ == other.width() && height_ == other.height();
  }

  bool operator==(const Plane&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

// Interleaved 8-bit raster with a fixed channel count.
template <int Channels>
class ByteImage {
 public:
  static constexpr int kChannels = Channels;

  ByteImage() = default;
  ByteImage(int width, int height, std::uint8_t fill = 0) : width_(width), height_(height) {
    if (width < 1 || height < 1) {
      throw Error(ErrorCode::InvalidArgument, "image dimensions must be positive");
    }
    data_.assign(static_cast<std::size_t>(width) * height * Channels, fill);
  }
  ByteImage(int width, int height, std::vector<std::uint8_t> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (width < 1 || height < 1) {
      throw Error(ErrorCode::InvalidArgument, "image dimensions must be positive");
    }
    if (data_.size() != static_cast<std::size_t>(width) * height * Channels) {
      throw Error(ErrorCode::DimensionMismatch, "image data length does not match width x height x channels");
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(width_) * height_; }

  std::uint8_t& at(int x, int y, int c) { return data_[offset(x, y) + c]; }
  std::uint8_t at(int x, int y, int c) const { return data_[offset(x, y) + c]; }
  std::uint8_t* pixel(int x, int y) { return data_.data() + offset(x, y); }
  const std::uint8_t* pixel(int x, int y) const { return data_.data() + offset(x, y); }

  std::vector<std::uint8_t>& data() noexcept { return data_; }
  const std::vector<std::uint8_t>& data() const noexcept { return data_; }

  template <typename Other>
  bool same_shape(const Other& other) const noexcept {
    return width_ == other.width() && height_ == other.height();
  }

  bool operator==(const ByteImage&) const = default;

 private:
  std::size_t offset(int x, int y) const noexcept {
    return (static_cast<std::size_t>(y) * width_ + x) * Channels;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

using RgbImage = ByteImage<3>;
using RgbaImage = ByteImage<4>;

using GrayMap = Plane<double>;
// Opacity map; values are expected in [0, 1]. See is_valid_alpha().
using AlphaMatte = Plane<double>;
using BinaryMask = Plane<std::uint8_t>;

enum class Label : std::uint8_t { Background = 0, Unknown = 1, Foreground = 2 };

using Trimap = Plane<Label>;

bool is_valid_alpha(const AlphaMatte& alpha);
AlphaMatte clamp_alpha(AlphaMatte alpha);

BinaryMask mask_complement(const BinaryMask& m);
BinaryMask mask_intersection(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_union(const BinaryMask& a, const BinaryMask& b);
// True iff every pixel set in `a` is also set in `b`.
bool mask_subset(const BinaryMask& a, const BinaryMask& b);
std::size_t mask_count(const BinaryMask& m);

// Mask of pixels carrying `label`.
BinaryMask label_mask(const Trimap& t, Label label);
std::size_t label_count(const Trimap& t, Label label);

// Exclusive upper corner: the box covers [x0, x1) x [y0, y1).
struct BoundingBox {
  int x0 = 0;
  int y0 = 0;
  int x1 = 1;
  int y1 = 1;

  bool operator==(const BoundingBox&) const = default;
};

struct Extent {
  int width = 0;
  int height = 0;

  bool operator==(const Extent&) const = default;
};

BoundingBox make_bbox(int x0, int y0, int x1, int y1);
Extent bbox_dimensions(const BoundingBox& b);
bool bbox_within(const BoundingBox& b, int width, int height);
// Tight box around the set pixels; throws EmptyMask when there are none.
BoundingBox mask_bounding_box(const BinaryMask& m);

}  // namespace instamatte
