#pragma once

#include <vector>

#include "instamatte/raster.hpp"

namespace instamatte {

struct TrimapParams {
  // Fraction of the bbox width/height average used as the dilation radius.
  double rate = 0.10;
  // Alpha at or above `hi_threshold` seeds Foreground; at or below `lo_threshold`, Background.
  double hi_threshold = 0.95;
  double lo_threshold = 0.05;
};

void validate(const TrimapParams& p);

// round(rate * (w + h) / 2), half-up, clamped to at least 1 pixel.
int dilation_radius(const BoundingBox& b, double rate);

// First-pass trimap from a coarse instance mask: Foreground is the mask eroded
// by `radius`, Background lies beyond the mask dilated by `radius`. A mask too
// thin to survive erosion keeps one Foreground pixel nearest its centroid.
Trimap mask_to_trimap(const BinaryMask& mask, int radius);

// Feedback-pass trimap from a previous alpha matte.
Trimap alpha_to_trimap(const AlphaMatte& alpha, int radius, const TrimapParams& p);

// Forces the eroded interiors of the other instances' masks to Background.
Trimap suppress_other_instances(const Trimap& t, const std::vector<BinaryMask>& others, int radius);

// Initial alpha implied by a trimap: 0 / 0.5 / 1.
AlphaMatte trimap_alpha(const Trimap& t);

}  // namespace instamatte
