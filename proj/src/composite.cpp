#include "instamatte/composite.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "json.hpp"

#include "instamatte/morphology.hpp"

namespace instamatte {

namespace {

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

template <typename A, typename B>
void require_shape(const A& a, const B& b, const char* what) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + " dimensions differ");
  }
}

}  // namespace

RgbImage composite_pixelwise(const RgbImage& fg, const RgbImage& bg, const AlphaMatte& alpha) {
  require_shape(fg, bg, "foreground and background");
  require_shape(fg, alpha, "image and alpha");
  RgbImage out(fg.width(), fg.height());
  const std::size_t n = fg.pixel_count();
  for (std::size_t i = 0; i < n; ++i) {
    const double a = alpha[i];
    for (int c = 0; c < 3; ++c) {
      const std::size_t k = i * 3 + c;
      out.data()[k] = to_byte(a * fg.data()[k] + (1.0 - a) * bg.data()[k]);
    }
  }
  return out;
}

RgbImage layer_composite(const RgbImage& image, const std::vector<AlphaMatte>& mattes,
                         const RgbImage& background) {
  require_shape(image, background, "image and background");
  RgbImage out = background;
  for (const AlphaMatte& m : mattes) out = composite_pixelwise(image, out, m);
  return out;
}

RgbaImage extract_rgba(const RgbImage& image, const AlphaMatte& alpha) {
  require_shape(image, alpha, "image and alpha");
  RgbaImage out(image.width(), image.height());
  for (std::size_t i = 0; i < image.pixel_count(); ++i) {
    for (int c = 0; c < 3; ++c) out.data()[i * 4 + c] = image.data()[i * 3 + c];
    out.data()[i * 4 + 3] = to_byte(std::clamp(alpha[i], 0.0, 1.0) * 255.0);
  }
  return out;
}

RgbImage over(const RgbaImage& top, const RgbImage& background) {
  require_shape(top, background, "overlay and background");
  RgbImage out(top.width(), top.height());
  for (std::size_t i = 0; i < top.pixel_count(); ++i) {
    const double a = top.data()[i * 4 + 3] / 255.0;
    for (int c = 0; c < 3; ++c) {
      out.data()[i * 3 + c] = to_byte(a * top.data()[i * 4 + c] + (1.0 - a) * background.data()[i * 3 + c]);
    }
  }
  return out;
}

const char* to_string(MetricRegion region) {
  return region == MetricRegion::All ? "all" : "unknown";
}

namespace {

// 3x3 Sobel gradient magnitude with replicated borders.
GrayMap sobel_magnitude(const AlphaMatte& a) {
  const int w = a.width();
  const int h = a.height();
  auto at = [&](int x, int y) { return a(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1)); };
  GrayMap out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double gx = (at(x + 1, y - 1) + 2 * at(x + 1, y) + at(x + 1, y + 1)) -
                        (at(x - 1, y - 1) + 2 * at(x - 1, y) + at(x - 1, y + 1));
      const double gy = (at(x - 1, y + 1) + 2 * at(x, y + 1) + at(x + 1, y + 1)) -
                        (at(x - 1, y - 1) + 2 * at(x, y - 1) + at(x + 1, y - 1));
      out(x, y) = std::sqrt(gx * gx + gy * gy);
    }
  }
  return out;
}

}  // namespace

MetricsReport compute_metrics(const AlphaMatte& alpha, const AlphaMatte& truth, const BinaryMask& region,
                              MetricRegion kind) {
  require_shape(alpha, truth, "alpha and ground truth");
  require_shape(alpha, region, "alpha and region");
  const std::size_t n = mask_count(region);
  if (n == 0) throw Error(ErrorCode::EmptyRegion, "metric region is empty");

  const GrayMap ga = sobel_magnitude(alpha);
  const GrayMap gt = sobel_magnitude(truth);
  MetricsReport m;
  m.region = kind;
  m.pixels = n;
  double sq = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (!region[i]) continue;
    const double d = alpha[i] - truth[i];
    m.sad += std::abs(d);
    sq += d * d;
    const double g = ga[i] - gt[i];
    m.gradient_error += g * g;
  }
  m.mse = sq / static_cast<double>(n);
  return m;
}

std::string format_metrics_text(const MetricsReport& m) {
  std::ostringstream os;
  os.precision(10);
  os << "sad=" << m.sad << "\n"
     << "mse=" << m.mse << "\n"
     << "gradient_error=" << m.gradient_error << "\n"
     << "region=" << to_string(m.region) << "\n"
     << "pixels=" << m.pixels << "\n";
  return os.str();
}

std::string format_metrics_json(const MetricsReport& m) {
  nlohmann::json j = {{"sad", m.sad},
                      {"mse", m.mse},
                      {"gradient_error", m.gradient_error},
                      {"region", to_string(m.region)},
                      {"pixels", m.pixels}};
  return j.dump(2) + "\n";
}

SyntheticScene make_synthetic(const RgbaImage& fg, const RgbImage& bg, int perturb_radius, std::uint64_t seed) {
  if (fg.width() > bg.width() || fg.height() > bg.height()) {
    throw Error(ErrorCode::ForegroundTooLarge, "foreground does not fit inside the background");
  }
  if (perturb_radius < 0) throw Error(ErrorCode::InvalidArgument, "perturbation radius must be non-negative");

  const int ox = (bg.width() - fg.width()) / 2;
  const int oy = (bg.height() - fg.height()) / 2;
  SyntheticScene scene;
  scene.gt_alpha = AlphaMatte(bg.width(), bg.height(), 0.0);
  RgbImage fg_canvas = bg;
  for (int y = 0; y < fg.height(); ++y) {
    for (int x = 0; x < fg.width(); ++x) {
      scene.gt_alpha(ox + x, oy + y) = fg.at(x, y, 3) / 255.0;
      for (int c = 0; c < 3; ++c) fg_canvas.at(ox + x, oy + y, c) = fg.at(x, y, c);
    }
  }
  scene.image = composite_pixelwise(fg_canvas, bg, scene.gt_alpha);

  BinaryMask exact(bg.width(), bg.height());
  for (std::size_t i = 0; i < exact.size(); ++i) exact[i] = scene.gt_alpha[i] >= 0.5 ? 1 : 0;
  if (mask_count(exact) == 0) throw Error(ErrorCode::EmptyMask, "foreground alpha never reaches 0.5");

  scene.coarse_mask = exact;
  if (perturb_radius > 0) {
    std::mt19937_64 rng(seed);
    const int r = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(perturb_radius));
    const bool grow = (rng() & 1U) != 0;
    BinaryMask perturbed = grow ? binary_dilate(exact, r) : binary_erode(exact, r);
    if (mask_count(perturbed) == 0) perturbed = binary_dilate(exact, r);
    scene.coarse_mask = std::move(perturbed);
  }
  scene.bbox = mask_bounding_box(scene.coarse_mask);
  return scene;
}

RgbaImage feathered_disk(int size, double radius, double feather, Color color) {
  RgbaImage out(size, size);
  const double c = (size - 1) / 2.0;
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double d = std::hypot(x - c, y - c);
      const double a = std::clamp(0.5 + (radius - d) / feather, 0.0, 1.0);
      std::uint8_t* p = out.pixel(x, y);
      p[0] = color.r;
      p[1] = color.g;
      p[2] = color.b;
      p[3] = to_byte(a * 255.0);
    }
  }
  return out;
}

RgbaImage soft_rect(int width, int height, int inset, double feather, Color color) {
  RgbaImage out(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      // Signed distance to the inset rectangle edge, positive inside.
      const double dx = std::min(x - inset, width - 1 - inset - x);
      const double dy = std::min(y - inset, height - 1 - inset - y);
      const double a = std::clamp(0.5 + std::min(dx, dy) / feather, 0.0, 1.0);
      std::uint8_t* p = out.pixel(x, y);
      p[0] = color.r;
      p[1] = color.g;
      p[2] = color.b;
      p[3] = to_byte(a * 255.0);
    }
  }
  return out;
}

RgbaImage motion_bar(int width, int height, int bar_width, int bar_height, int blur_length, Color color) {
  RgbaImage out(width, height);
  const int x0 = (width - bar_width) / 2;
  const int y0 = (height - bar_height) / 2;
  for (int y = 0; y < height; ++y) {
    const bool in_rows = y >= y0 && y < y0 + bar_height;
    for (int x = 0; x < width; ++x) {
      // Box-filtered coverage of the bar along the motion direction.
      double a = 0.0;
      if (in_rows) {
        const double lo = x - blur_length / 2.0;
        const double hi = x + blur_length / 2.0;
        const double overlap = std::max(0.0, std::min(hi, x0 + bar_width + 0.0) - std::max(lo, x0 + 0.0));
        a = blur_length > 0 ? std::clamp(overlap / blur_length, 0.0, 1.0)
                            : (x >= x0 && x < x0 + bar_width ? 1.0 : 0.0);
      }
      std::uint8_t* p = out.pixel(x, y);
      p[0] = color.r;
      p[1] = color.g;
      p[2] = color.b;
      p[3] = to_byte(a * 255.0);
    }
  }
  return out;
}

RgbImage gradient_background(int width, int height, Color from, Color to) {
  RgbImage out(width, height);
  const double span = std::max(1, width + height - 2);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double t = (x + y) / span;
      std::uint8_t* p = out.pixel(x, y);
      p[0] = to_byte(from.r + t * (to.r - from.r));
      p[1] = to_byte(from.g + t * (to.g - from.g));
      p[2] = to_byte(from.b + t * (to.b - from.b));
    }
  }
  return out;
}

FixtureKind parse_fixture_kind(const std::string& name) {
  if (name == "disk") return FixtureKind::Disk;
  if (name == "rect") return FixtureKind::Rect;
  if (name == "motion-bar") return FixtureKind::MotionBar;
  throw Error(ErrorCode::InvalidArgument, "unknown fixture kind '" + name + "'");
}

Fixture make_fixture(FixtureKind kind, int perturb_radius, std::uint64_t seed) {
  constexpr int kCanvas = 200;
  const Color object{235, 170, 40};
  // The disk sits on a flat backdrop so its ground truth is exactly recoverable; the others get a gradient.
  const Color backdrop{20, 50, 150};
  RgbImage bg = kind == FixtureKind::Disk ? gradient_background(kCanvas, kCanvas, backdrop, backdrop)
                                          : gradient_background(kCanvas, kCanvas, backdrop, Color{60, 110, 210});
  RgbaImage fg;
  switch (kind) {
    case FixtureKind::Disk: fg = feathered_disk(120, 40.0, 4.0, object); break;
    case FixtureKind::Rect: fg = soft_rect(120, 90, 10, 4.0, object); break;
    case FixtureKind::MotionBar: fg = motion_bar(140, 80, 60, 30, 16, object); break;
  }
  Fixture f;
  f.scene = make_synthetic(fg, bg, perturb_radius, seed);
  f.background = std::move(bg);
  return f;
}

}  // namespace instamatte
