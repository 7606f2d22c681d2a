#include "instamatte/morphology.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace instamatte {

BinaryMask binary_dilate(const BinaryMask& m, int radius, Border border) {
  if (radius < 0) throw Error(ErrorCode::InvalidArgument, "dilation radius must be non-negative");
  if (radius == 0) return m;

  const int w = m.width();
  const int h = m.height();
  const bool outside = border == Border::True;

  // Half-width of the disk at each vertical offset.
  std::vector<int> half(static_cast<std::size_t>(radius) + 1);
  for (int dy = 0; dy <= radius; ++dy) {
    half[dy] = static_cast<int>(std::floor(std::sqrt(static_cast<double>(radius) * radius - dy * dy)));
  }

  // Per-row prefix counts turn each horizontal span query into O(1).
  std::vector<int> prefix(static_cast<std::size_t>(h) * (w + 1), 0);
  for (int y = 0; y < h; ++y) {
    int* row = prefix.data() + static_cast<std::size_t>(y) * (w + 1);
    for (int x = 0; x < w; ++x) row[x + 1] = row[x] + (m(x, y) ? 1 : 0);
  }

  BinaryMask out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      bool hit = false;
      for (int dy = -radius; dy <= radius && !hit; ++dy) {
        const int hw = half[std::abs(dy)];
        const int yy = y + dy;
        if (yy < 0 || yy >= h) {
          hit = outside;
          continue;
        }
        const int lo = x - hw;
        const int hi = x + hw;
        if (outside && (lo < 0 || hi >= w)) {
          hit = true;
          continue;
        }
        const int* row = prefix.data() + static_cast<std::size_t>(yy) * (w + 1);
        const int a = std::max(lo, 0);
        const int b = std::min(hi, w - 1);
        hit = row[b + 1] - row[a] > 0;
      }
      out(x, y) = hit ? 1 : 0;
    }
  }
  return out;
}

BinaryMask binary_erode(const BinaryMask& m, int radius) {
  if (radius < 0) throw Error(ErrorCode::InvalidArgument, "erosion radius must be non-negative");
  if (radius == 0) return m;
  return mask_complement(binary_dilate(mask_complement(m), radius, Border::True));
}

}  // namespace instamatte
