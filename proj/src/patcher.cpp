#include "instamatte/patcher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "instamatte/parallel.hpp"
#include "instamatte/trimap.hpp"

namespace instamatte {

namespace {

struct Tap {
  int i0, i1;
  double w1;
};

// Source taps for each destination coordinate along one axis.
std::vector<Tap> bilinear_taps(int src, int dst) {
  std::vector<Tap> taps(static_cast<std::size_t>(dst));
  const double scale = static_cast<double>(src) / dst;
  for (int d = 0; d < dst; ++d) {
    double s = (d + 0.5) * scale - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(src - 1));
    const int i0 = static_cast<int>(std::floor(s));
    const int i1 = std::min(i0 + 1, src - 1);
    taps[d] = Tap{i0, i1, s - i0};
  }
  return taps;
}

}  // namespace

RgbImage resize_bilinear(const RgbImage& image, Extent size) {
  if (size.width == image.width() && size.height == image.height()) return image;
  const auto tx = bilinear_taps(image.width(), size.width);
  const auto ty = bilinear_taps(image.height(), size.height);
  RgbImage out(size.width, size.height);
  for (int y = 0; y < size.height; ++y) {
    const Tap& v = ty[y];
    for (int x = 0; x < size.width; ++x) {
      const Tap& u = tx[x];
      for (int c = 0; c < 3; ++c) {
        const double top = image.at(u.i0, v.i0, c) * (1.0 - u.w1) + image.at(u.i1, v.i0, c) * u.w1;
        const double bottom = image.at(u.i0, v.i1, c) * (1.0 - u.w1) + image.at(u.i1, v.i1, c) * u.w1;
        const double value = top * (1.0 - v.w1) + bottom * v.w1;
        out.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(std::floor(value + 0.5), 0.0, 255.0));
      }
    }
  }
  return out;
}

GrayMap resize_bilinear(const GrayMap& map, Extent size) {
  if (size.width == map.width() && size.height == map.height()) return map;
  const auto tx = bilinear_taps(map.width(), size.width);
  const auto ty = bilinear_taps(map.height(), size.height);
  GrayMap out(size.width, size.height);
  for (int y = 0; y < size.height; ++y) {
    const Tap& v = ty[y];
    for (int x = 0; x < size.width; ++x) {
      const Tap& u = tx[x];
      const double top = map(u.i0, v.i0) * (1.0 - u.w1) + map(u.i1, v.i0) * u.w1;
      const double bottom = map(u.i0, v.i1) * (1.0 - u.w1) + map(u.i1, v.i1) * u.w1;
      out(x, y) = top * (1.0 - v.w1) + bottom * v.w1;
    }
  }
  return out;
}

Trimap resize_nearest(const Trimap& t, Extent size) {
  if (size.width == t.width() && size.height == t.height()) return t;
  Trimap out(size.width, size.height);
  const double sx = static_cast<double>(t.width()) / size.width;
  const double sy = static_cast<double>(t.height()) / size.height;
  for (int y = 0; y < size.height; ++y) {
    const int yy = std::min(static_cast<int>(std::floor((y + 0.5) * sy)), t.height() - 1);
    for (int x = 0; x < size.width; ++x) {
      const int xx = std::min(static_cast<int>(std::floor((x + 0.5) * sx)), t.width() - 1);
      out(x, y) = t(xx, yy);
    }
  }
  return out;
}

WorkingInput resize_to_working(const RgbImage& image, const Trimap& t, Extent working, ResizeMode mode) {
  if (!image.same_shape(t)) throw Error(ErrorCode::DimensionMismatch, "image and trimap dimensions differ");
  if (working.width < 1 || working.height < 1) {
    throw Error(ErrorCode::InvalidArgument, "working size must be positive");
  }
  if (image.width() <= working.width && image.height() <= working.height) {
    return WorkingInput{image, t, false};
  }
  Extent target = working;
  if (mode == ResizeMode::KeepAspect) {
    const double scale = std::min(static_cast<double>(working.width) / image.width(),
                                  static_cast<double>(working.height) / image.height());
    target.width = std::max(1, static_cast<int>(std::floor(image.width() * scale + 0.5)));
    target.height = std::max(1, static_cast<int>(std::floor(image.height() * scale + 0.5)));
  }
  return WorkingInput{resize_bilinear(image, target), resize_nearest(t, target), true};
}

PatchRect patch_around(Point center, Extent patch, Extent bounds) {
  const int x = std::clamp(center.x - patch.width / 2, 0, bounds.width - patch.width);
  const int y = std::clamp(center.y - patch.height / 2, 0, bounds.height - patch.height);
  return PatchRect{x, y, patch.width, patch.height};
}

PatchPlan sample_patch_centers(const Trimap& t, Extent patch, std::uint64_t seed) {
  if (patch.width < 1 || patch.height < 1 || patch.width > t.width() || patch.height > t.height()) {
    throw Error(ErrorCode::InvalidArgument, "patch must be positive and no larger than the raster");
  }
  std::vector<std::size_t> uncovered;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] == Label::Unknown) uncovered.push_back(i);
  }
  if (uncovered.empty()) throw Error(ErrorCode::NoUnknownRegion, "trimap has no Unknown pixel");

  PatchPlan plan;
  plan.patch_size = patch;
  plan.working_size = Extent{t.width(), t.height()};
  plan.rng_seed = seed;

  const Extent bounds{t.width(), t.height()};
  std::mt19937_64 rng(seed);
  while (!uncovered.empty()) {
    const std::size_t pick = uncovered[rng() % uncovered.size()];
    const Point center{static_cast<int>(pick % t.width()), static_cast<int>(pick / t.width())};
    const PatchRect rect = patch_around(center, patch, bounds);
    plan.centers.push_back(center);
    plan.rects.push_back(rect);
    std::erase_if(uncovered, [&](std::size_t i) {
      return rect.contains(static_cast<int>(i % t.width()), static_cast<int>(i / t.width()));
    });
  }
  return plan;
}

PatchPlan sample_patch_centers(const Trimap& t, int patch, std::uint64_t seed) {
  return sample_patch_centers(t, Extent{patch, patch}, seed);
}

bool is_absent(double v) noexcept { return std::isnan(v); }

GrayMap blend_round(const std::vector<PlacedPatch>& patches, Extent dims) {
  GrayMap sum(dims.width, dims.height, 0.0);
  std::vector<int> hits(sum.size(), 0);
  for (const PlacedPatch& p : patches) {
    if (p.x < 0 || p.y < 0 || p.x + p.alpha.width() > dims.width || p.y + p.alpha.height() > dims.height) {
      throw Error(ErrorCode::InvalidArgument, "patch lies outside the blend canvas");
    }
    for (int y = 0; y < p.alpha.height(); ++y) {
      for (int x = 0; x < p.alpha.width(); ++x) {
        const std::size_t i = sum.index(p.x + x, p.y + y);
        sum[i] += p.alpha(x, y);
        ++hits[i];
      }
    }
  }
  for (std::size_t i = 0; i < sum.size(); ++i) {
    sum[i] = hits[i] > 0 ? sum[i] / hits[i] : std::numeric_limits<double>::quiet_NaN();
  }
  return sum;
}

GrayMap multi_sample_median(const std::vector<GrayMap>& rounds, const Trimap& constraints) {
  if (rounds.empty()) throw Error(ErrorCode::InvalidArgument, "median needs at least one round");
  for (const GrayMap& r : rounds) {
    if (!r.same_shape(constraints)) throw Error(ErrorCode::DimensionMismatch, "round dimensions differ");
  }
  GrayMap out(constraints.width(), constraints.height());
  std::vector<double> values;
  values.reserve(rounds.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    values.clear();
    for (const GrayMap& r : rounds) {
      if (!is_absent(r[i])) values.push_back(r[i]);
    }
    if (values.empty()) {
      switch (constraints[i]) {
        case Label::Foreground: out[i] = 1.0; break;
        case Label::Background: out[i] = 0.0; break;
        case Label::Unknown:
          throw Error(ErrorCode::UncoveredUnknownPixel,
                      "Unknown pixel " + std::to_string(i) + " was covered by no patch in any round");
      }
      continue;
    }
    std::sort(values.begin(), values.end());
    const std::size_t m = values.size() / 2;
    out[i] = values.size() % 2 == 1 ? values[m] : 0.5 * (values[m - 1] + values[m]);
  }
  return out;
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t value) {
  // splitmix64 finalizer over the combined state.
  std::uint64_t z = base ^ (value + 0x9e3779b97f4a7c15ULL + (base << 6) + (base >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

bool has_both_constraints(const Trimap& t, const PatchRect& r) {
  bool fg = false, bg = false;
  for (int y = r.y; y < r.y + r.height && !(fg && bg); ++y) {
    for (int x = r.x; x < r.x + r.width; ++x) {
      fg = fg || t(x, y) == Label::Foreground;
      bg = bg || t(x, y) == Label::Background;
    }
  }
  return fg && bg;
}

// Grows a patch symmetrically until it holds both a Foreground and a
// Background pixel, so every request satisfies the backend contract.
PatchRect grow_until_constrained(const Trimap& t, PatchRect r) {
  const int w = t.width();
  const int h = t.height();
  while (!has_both_constraints(t, r)) {
    if (r.width == w && r.height == h) {
      throw Error(ErrorCode::InvalidRequest, "trimap lacks a Foreground or a Background pixel");
    }
    const int step = std::max({1, r.width / 8, r.height / 8});
    const int x0 = std::max(0, r.x - step);
    const int y0 = std::max(0, r.y - step);
    const int x1 = std::min(w, r.x + r.width + step);
    const int y1 = std::min(h, r.y + r.height + step);
    r = PatchRect{x0, y0, x1 - x0, y1 - y0};
  }
  return r;
}

RgbImage crop(const RgbImage& image, const PatchRect& r) {
  RgbImage out(r.width, r.height);
  for (int y = 0; y < r.height; ++y) {
    const std::uint8_t* src = image.pixel(r.x, r.y + y);
    std::copy(src, src + 3 * r.width, out.pixel(0, y));
  }
  return out;
}

Trimap crop(const Trimap& t, const PatchRect& r) {
  Trimap out(r.width, r.height);
  for (int y = 0; y < r.height; ++y) {
    for (int x = 0; x < r.width; ++x) out(x, y) = t(r.x + x, r.y + y);
  }
  return out;
}

AlphaMatte impose(GrayMap alpha, const Trimap& t) {
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (t[i] == Label::Foreground) {
      alpha[i] = 1.0;
    } else if (t[i] == Label::Background) {
      alpha[i] = 0.0;
    } else {
      alpha[i] = std::clamp(alpha[i], 0.0, 1.0);
    }
  }
  return alpha;
}

}  // namespace

AlphaMatte run_patched(const MattingBackend& backend, const RgbImage& image, const Trimap& t,
                       const PipelineConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  if (!image.same_shape(t)) throw Error(ErrorCode::DimensionMismatch, "image and trimap dimensions differ");
  if (label_count(t, Label::Unknown) == 0) return trimap_alpha(t);
  if (label_count(t, Label::Foreground) == 0 || label_count(t, Label::Background) == 0) {
    throw Error(ErrorCode::InvalidRequest, "trimap needs a Foreground and a Background pixel");
  }

  const WorkingInput work = resize_to_working(image, t, cfg.working_size, cfg.resize_mode);
  const Extent dims{work.trimap.width(), work.trimap.height()};

  GrayMap merged;
  if (label_count(work.trimap, Label::Unknown) == 0) {
    merged = trimap_alpha(work.trimap);
  } else {
    const Extent patch{std::min(cfg.patch_size, dims.width), std::min(cfg.patch_size, dims.height)};
    const auto rounds_n = static_cast<std::size_t>(cfg.samples_k);
    std::vector<PatchPlan> plans(rounds_n);
    std::vector<std::vector<PatchRect>> rects(rounds_n);
    for (std::size_t k = 0; k < rounds_n; ++k) {
      plans[k] = sample_patch_centers(work.trimap, patch, mix_seed(seed, k));
      for (const PatchRect& r : plans[k].rects) rects[k].push_back(grow_until_constrained(work.trimap, r));
    }

    // Flatten every (round, patch) job so workers can share them evenly.
    struct Job {
      std::size_t round;
      std::size_t patch;
    };
    std::vector<Job> jobs;
    for (std::size_t k = 0; k < rounds_n; ++k) {
      for (std::size_t p = 0; p < rects[k].size(); ++p) jobs.push_back(Job{k, p});
    }
    std::vector<std::vector<PlacedPatch>> placed(rounds_n);
    for (std::size_t k = 0; k < rounds_n; ++k) placed[k].resize(rects[k].size());

    const int threads = backend.reentrant() ? resolve_threads(cfg.threads) : 1;
    parallel_for(jobs.size(), threads, [&](std::size_t j) {
      const Job& job = jobs[j];
      const PatchRect& r = rects[job.round][job.patch];
      MattingRequest req{crop(work.image, r), crop(work.trimap, r)};
      placed[job.round][job.patch] = PlacedPatch{matte_patch(backend, req), r.x, r.y};
    });

    std::vector<GrayMap> blended(rounds_n);
    for (std::size_t k = 0; k < rounds_n; ++k) blended[k] = blend_round(placed[k], dims);
    merged = multi_sample_median(blended, work.trimap);
  }

  if (work.resized) merged = resize_bilinear(merged, Extent{t.width(), t.height()});
  return impose(std::move(merged), t);
}

}  // namespace instamatte
