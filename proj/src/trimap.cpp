#include "instamatte/trimap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "instamatte/morphology.hpp"

namespace instamatte {

void validate(const TrimapParams& p) {
  if (!(p.rate > 0.0 && p.rate < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "trimap rate must lie in (0, 1)");
  }
  if (!(p.lo_threshold >= 0.0 && p.lo_threshold < p.hi_threshold && p.hi_threshold <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "trimap thresholds must satisfy 0 <= lo < hi <= 1");
  }
}

int dilation_radius(const BoundingBox& b, double rate) {
  if (!(rate > 0.0 && rate < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "dilation rate must lie in (0, 1)");
  }
  const Extent e = bbox_dimensions(b);
  const double raw = rate * (e.width + e.height) / 2.0;
  return std::max(1, static_cast<int>(std::floor(raw + 0.5)));
}

namespace {

// Mask pixel nearest to the rounded centroid; ties resolve in scan order.
std::size_t centroid_pixel(const BinaryMask& mask) {
  double sx = 0.0, sy = 0.0;
  std::size_t n = 0;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask(x, y)) continue;
      sx += x;
      sy += y;
      ++n;
    }
  }
  const double cx = std::floor(sx / n + 0.5);
  const double cy = std::floor(sy / n + 0.5);
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask(x, y)) continue;
      const double d = (x - cx) * (x - cx) + (y - cy) * (y - cy);
      if (d < best_d) {
        best_d = d;
        best = mask.index(x, y);
      }
    }
  }
  return best;
}

}  // namespace

Trimap mask_to_trimap(const BinaryMask& mask, int radius) {
  if (radius < 1) throw Error(ErrorCode::InvalidArgument, "trimap radius must be at least 1");
  if (mask_count(mask) == 0) throw Error(ErrorCode::EmptyMask, "instance mask has no foreground pixel");

  BinaryMask fg = binary_erode(mask, radius);
  if (mask_count(fg) == 0) fg[centroid_pixel(mask)] = 1;
  const BinaryMask grown = binary_dilate(mask, radius);

  Trimap t(mask.width(), mask.height(), Label::Unknown);
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (fg[i]) {
      t[i] = Label::Foreground;
    } else if (!grown[i]) {
      t[i] = Label::Background;
    }
  }
  return t;
}

Trimap alpha_to_trimap(const AlphaMatte& alpha, int radius, const TrimapParams& p) {
  if (radius < 1) throw Error(ErrorCode::InvalidArgument, "trimap radius must be at least 1");
  validate(p);

  BinaryMask fg(alpha.width(), alpha.height());
  BinaryMask bg(alpha.width(), alpha.height());
  BinaryMask unknown(alpha.width(), alpha.height());
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (alpha[i] >= p.hi_threshold) {
      fg[i] = 1;
    } else if (alpha[i] <= p.lo_threshold) {
      bg[i] = 1;
    } else {
      unknown[i] = 1;
    }
  }
  const std::size_t n_fg = mask_count(fg);
  const std::size_t n_bg = mask_count(bg);
  if (n_fg == alpha.size() || n_bg == alpha.size()) {
    throw Error(ErrorCode::DegenerateAlpha, "alpha matte has no object boundary");
  }

  BinaryMask band;
  if (mask_count(unknown) == 0) {
    band = mask_intersection(binary_dilate(fg, radius), binary_dilate(bg, radius));
  } else {
    band = binary_dilate(unknown, radius);
  }

  Trimap t(alpha.width(), alpha.height());
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (band[i]) {
      t[i] = Label::Unknown;
    } else {
      t[i] = fg[i] ? Label::Foreground : Label::Background;
    }
  }
  return t;
}

Trimap suppress_other_instances(const Trimap& t, const std::vector<BinaryMask>& others, int radius) {
  Trimap out = t;
  for (const BinaryMask& other : others) {
    if (!other.same_shape(t)) {
      throw Error(ErrorCode::DimensionMismatch, "suppressor mask dimensions differ from trimap");
    }
    const BinaryMask interior = binary_erode(other, radius);
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (interior[i]) out[i] = Label::Background;
    }
  }
  return out;
}

AlphaMatte trimap_alpha(const Trimap& t) {
  AlphaMatte a(t.width(), t.height());
  for (std::size_t i = 0; i < t.size(); ++i) {
    a[i] = t[i] == Label::Foreground ? 1.0 : (t[i] == Label::Unknown ? 0.5 : 0.0);
  }
  return a;
}

}  // namespace instamatte
