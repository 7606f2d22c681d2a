#include "instamatte/raster.hpp"

#include <algorithm>

namespace instamatte {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::DimensionMismatch: return "dimension-mismatch";
    case ErrorCode::MalformedTrimap: return "malformed-trimap";
    case ErrorCode::EmptyMask: return "empty-mask";
    case ErrorCode::DegenerateAlpha: return "degenerate-alpha";
    case ErrorCode::ImageTooSmall: return "image-too-small";
    case ErrorCode::InvalidRequest: return "invalid-request";
    case ErrorCode::NonConvergence: return "non-convergence";
    case ErrorCode::BackendFailure: return "backend-failure";
    case ErrorCode::NoUnknownRegion: return "no-unknown-region";
    case ErrorCode::UncoveredUnknownPixel: return "uncovered-unknown-pixel";
    case ErrorCode::EmptyRegion: return "empty-region";
    case ErrorCode::ForegroundTooLarge: return "foreground-larger-than-background";
    case ErrorCode::SchemaViolation: return "schema-violation";
    case ErrorCode::DuplicateId: return "duplicate-id";
    case ErrorCode::RleLengthMismatch: return "rle-length-mismatch";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

bool is_valid_alpha(const AlphaMatte& alpha) {
  return std::all_of(alpha.data().begin(), alpha.data().end(),
                     [](double v) { return v >= 0.0 && v <= 1.0; });
}

AlphaMatte clamp_alpha(AlphaMatte alpha) {
  for (double& v : alpha.data()) v = std::clamp(v, 0.0, 1.0);
  return alpha;
}

namespace {

void require_same_shape(const BinaryMask& a, const BinaryMask& b) {
  if (!a.same_shape(b)) throw Error(ErrorCode::DimensionMismatch, "mask dimensions differ");
}

}  // namespace

BinaryMask mask_complement(const BinaryMask& m) {
  BinaryMask out(m.width(), m.height());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = m[i] ? 0 : 1;
  return out;
}

BinaryMask mask_intersection(const BinaryMask& a, const BinaryMask& b) {
  require_same_shape(a, b);
  BinaryMask out(a.width(), a.height());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (a[i] && b[i]) ? 1 : 0;
  return out;
}

BinaryMask mask_union(const BinaryMask& a, const BinaryMask& b) {
  require_same_shape(a, b);
  BinaryMask out(a.width(), a.height());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (a[i] || b[i]) ? 1 : 0;
  return out;
}

bool mask_subset(const BinaryMask& a, const BinaryMask& b) {
  require_same_shape(a, b);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] && !b[i]) return false;
  }
  return true;
}

std::size_t mask_count(const BinaryMask& m) {
  return static_cast<std::size_t>(std::count_if(m.data().begin(), m.data().end(),
                                                [](std::uint8_t v) { return v != 0; }));
}

BinaryMask label_mask(const Trimap& t, Label label) {
  BinaryMask out(t.width(), t.height());
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = t[i] == label ? 1 : 0;
  return out;
}

std::size_t label_count(const Trimap& t, Label label) {
  return static_cast<std::size_t>(std::count(t.data().begin(), t.data().end(), label));
}

BoundingBox make_bbox(int x0, int y0, int x1, int y1) {
  if (x1 <= x0 || y1 <= y0) {
    throw Error(ErrorCode::InvalidArgument, "bounding box requires x1 > x0 and y1 > y0");
  }
  return BoundingBox{x0, y0, x1, y1};
}

Extent bbox_dimensions(const BoundingBox& b) { return Extent{b.x1 - b.x0, b.y1 - b.y0}; }

bool bbox_within(const BoundingBox& b, int width, int height) {
  return b.x0 >= 0 && b.y0 >= 0 && b.x1 <= width && b.y1 <= height && b.x1 > b.x0 && b.y1 > b.y0;
}

BoundingBox mask_bounding_box(const BinaryMask& m) {
  int x0 = m.width(), y0 = m.height(), x1 = -1, y1 = -1;
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (!m(x, y)) continue;
      x0 = std::min(x0, x);
      y0 = std::min(y0, y);
      x1 = std::max(x1, x);
      y1 = std::max(y1, y);
    }
  }
  if (x1 < 0) throw Error(ErrorCode::EmptyMask, "mask has no foreground pixel");
  return BoundingBox{x0, y0, x1 + 1, y1 + 1};
}

}  // namespace instamatte
