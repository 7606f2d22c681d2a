#pragma once

#include <cstdint>
#include <vector>

#include "instamatte/config.hpp"
#include "instamatte/matting.hpp"
#include "instamatte/raster.hpp"

namespace instamatte {

struct Point {
  int x = 0;
  int y = 0;

  bool operator==(const Point&) const = default;
};

// Axis-aligned rectangle [x, x + width) x [y, y + height).
struct PatchRect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  bool contains(int px, int py) const noexcept {
    return px >= x && py >= y && px < x + width && py < y + height;
  }
  bool operator==(const PatchRect&) const = default;
};

struct PatchPlan {
  std::vector<Point> centers;
  // rects[i] is the in-bounds patch around centers[i].
  std::vector<PatchRect> rects;
  Extent patch_size;
  Extent working_size;
  std::uint64_t rng_seed = 0;
};

struct WorkingInput {
  RgbImage image;
  Trimap trimap;
  bool resized = false;
};

// Bilinear resampling with pixel-center alignment.
RgbImage resize_bilinear(const RgbImage& image, Extent size);
GrayMap resize_bilinear(const GrayMap& map, Extent size);
Trimap resize_nearest(const Trimap& t, Extent size);

// Images no larger than `working` in both dimensions pass through unchanged.
WorkingInput resize_to_working(const RgbImage& image, const Trimap& t, Extent working,
                               ResizeMode mode = ResizeMode::Stretch);

// The patch rectangle of the given size around `center`, shifted to lie inside
// a raster of `bounds`.
PatchRect patch_around(Point center, Extent patch, Extent bounds);

// Draws uncovered Unknown pixels uniformly at random as patch centers until
// every Unknown pixel is covered.
PatchPlan sample_patch_centers(const Trimap& t, Extent patch, std::uint64_t seed);
PatchPlan sample_patch_centers(const Trimap& t, int patch, std::uint64_t seed);

struct PlacedPatch {
  AlphaMatte alpha;
  int x = 0;
  int y = 0;
};

// Absent (uncovered) pixels are NaN.
bool is_absent(double v) noexcept;

// Mean of all patch values covering each pixel.
GrayMap blend_round(const std::vector<PlacedPatch>& patches, Extent dims);

// Per-pixel median over rounds, ignoring absent values. Pixels absent from
// every round take their trimap value; an absent Unknown pixel is an error.
GrayMap multi_sample_median(const std::vector<GrayMap>& rounds, const Trimap& constraints);

// Seed for one sampling round of one pass.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t value);

// Patch-based inference of one matte at the image's resolution.
AlphaMatte run_patched(const MattingBackend& backend, const RgbImage& image, const Trimap& t,
                       const PipelineConfig& cfg, std::uint64_t seed);

}  // namespace instamatte
