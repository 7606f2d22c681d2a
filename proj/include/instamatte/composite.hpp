#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "instamatte/raster.hpp"

namespace instamatte {

// out = alpha * fg + (1 - alpha) * bg per channel, rounded half-up at the end.
RgbImage composite_pixelwise(const RgbImage& fg, const RgbImage& bg, const AlphaMatte& alpha);

// Layers `image` through each matte in order, starting from `background`.
RgbImage layer_composite(const RgbImage& image, const std::vector<AlphaMatte>& mattes,
                         const RgbImage& background);

// Unpremultiplied cut-out: RGB copied, alpha quantized to 8 bits.
RgbaImage extract_rgba(const RgbImage& image, const AlphaMatte& alpha);

// Standard unpremultiplied "over" of an RGBA raster onto an opaque background.
RgbImage over(const RgbaImage& top, const RgbImage& background);

enum class MetricRegion { All, UnknownBand };

const char* to_string(MetricRegion region);

struct MetricsReport {
  double sad = 0.0;
  double mse = 0.0;
  double gradient_error = 0.0;
  MetricRegion region = MetricRegion::All;
  std::size_t pixels = 0;
};

// SAD, MSE and Sobel gradient error of `alpha` against `truth` over `region`.
MetricsReport compute_metrics(const AlphaMatte& alpha, const AlphaMatte& truth, const BinaryMask& region,
                              MetricRegion kind = MetricRegion::All);

// Lines of the form `metric=value`.
std::string format_metrics_text(const MetricsReport& m);
std::string format_metrics_json(const MetricsReport& m);

struct SyntheticScene {
  RgbImage image;
  AlphaMatte gt_alpha;
  BinaryMask coarse_mask;
  BoundingBox bbox;
};

// Composites `fg` (centered) over `bg` and derives a coarse instance mask by
// thresholding the ground-truth alpha at 0.5 and randomly dilating or eroding
// it by up to `perturb_radius` pixels.
SyntheticScene make_synthetic(const RgbaImage& fg, const RgbImage& bg, int perturb_radius, std::uint64_t seed);

struct Color {
  std::uint8_t r = 0, g = 0, b = 0;
};

// Procedural fixtures.
RgbaImage feathered_disk(int size, double radius, double feather, Color color);
RgbaImage soft_rect(int width, int height, int inset, double feather, Color color);
// A bar smeared horizontally, as if captured with motion blur.
RgbaImage motion_bar(int width, int height, int bar_width, int bar_height, int blur_length, Color color);
// Smooth two-color diagonal gradient.
RgbImage gradient_background(int width, int height, Color from, Color to);

enum class FixtureKind { Disk, Rect, MotionBar };

// Throws InvalidArgument for anything but "disk", "rect" or "motion-bar".
FixtureKind parse_fixture_kind(const std::string& name);

struct Fixture {
  SyntheticScene scene;
  RgbImage background;
};

// 200x200 scenes. The disk (radius 40, 4 px linear feather) sits on flat
// blue; the rectangle and the bar sit on a blue gradient.
Fixture make_fixture(FixtureKind kind, int perturb_radius, std::uint64_t seed);

}  // namespace instamatte
