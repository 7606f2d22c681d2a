// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli_runner.hpp"
#include "instamatte/composite.hpp"
#include "instamatte/image_io.hpp"
#include "instamatte/manifest.hpp"
#include "instamatte/matting.hpp"
#include "instamatte/morphology.hpp"
#include "instamatte/patcher.hpp"
#include "instamatte/pipeline.hpp"
#include "instamatte/trimap.hpp"
#include "oracles.hpp"

using namespace instamatte;
namespace fs = std::filesystem;

namespace {

// Tolerances and limits.
constexpr double kCompositeTolerance = 0.5;
constexpr double kSolverTolerance = 1e-4;
constexpr double kRowSumTolerance = 1e-9;
constexpr double kEigenTolerance = -1e-9;
constexpr double kRecoveryMse = 0.01;
constexpr double kIsolationAlpha = 0.02;
constexpr int kOverTolerance = 1;

// MSE over the final Unknown band of the disk fixture (P=4, K=10, seed 0),
// recorded from the first passing run. Later runs must stay within 5%.
constexpr double kDiskMseBaseline = 4.82518e-07;
constexpr double kBaselineSlack = 0.05;

constexpr double kLimit1 = 1.0;
constexpr double kLimit2 = 5.0;
constexpr double kLimit3 = 30.0;
constexpr double kLimit4 = 10.0;
constexpr double kLimit5 = 10.0;
constexpr double kLimit6 = 300.0;
constexpr double kLimit7 = 120.0;
constexpr double kLimit8 = 600.0;
constexpr double kLimit9 = 60.0;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects the first few failure messages.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    ++failures_;
    if (failures_ <= 3) notes_ += (notes_.empty() ? "" : "; ") + what;
  }
  void note(const std::string& s) { info_ += (info_.empty() ? "" : ", ") + s; }
  Outcome result() const {
    std::string d = info_;
    if (failures_ > 0) d += (d.empty() ? "" : "; ") + std::to_string(failures_) + " failure(s): " + notes_;
    return {failures_ == 0, d};
  }

 private:
  int failures_ = 0;
  std::string notes_;
  std::string info_;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

Outcome composite_exactness() {
  Check c;
  std::mt19937_64 rng(101);
  RgbImage fg(1000, 1), bg(1000, 1);
  AlphaMatte alpha(1000, 1);
  for (auto& v : fg.data()) v = static_cast<std::uint8_t>(rng() % 256);
  for (auto& v : bg.data()) v = static_cast<std::uint8_t>(rng() % 256);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (auto& a : alpha.data()) a = unit(rng);
  const RgbImage out = composite_pixelwise(fg, bg, alpha);
  double worst = 0.0;
  for (int x = 0; x < 1000; ++x) {
    for (int ch = 0; ch < 3; ++ch) {
      const double exact = alpha(x, 0) * fg.at(x, 0, ch) + (1.0 - alpha(x, 0)) * bg.at(x, 0, ch);
      worst = std::max(worst, std::abs(out.at(x, 0, ch) - exact));
    }
  }
  c.expect(worst <= kCompositeTolerance, "max deviation " + fmt(worst));
  c.expect(composite_pixelwise(fg, bg, AlphaMatte(1000, 1, 1.0)) == fg, "alpha=1 not bit-exact");
  c.expect(composite_pixelwise(fg, bg, AlphaMatte(1000, 1, 0.0)) == bg, "alpha=0 not bit-exact");
  c.note("max deviation " + fmt(worst));
  return c.result();
}

// Random blobs around a solid core wide enough to survive erosion at every tested radius.
BinaryMask cored_mask(int w, int h, int core, std::mt19937_64& rng) {
  BinaryMask m = oracle::random_blob_mask(w, h, rng);
  const int cx = w / 2 + static_cast<int>(rng() % 5) - 2, cy = h / 2 + static_cast<int>(rng() % 5) - 2;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= core * core) m(x, y) = 1;
    }
  }
  return m;
}

Outcome trimap_suite() {
  Check c;
  std::mt19937_64 rng(202);
  constexpr int kMaxRadius = 5;
  for (int trial = 0; trial < 50; ++trial) {
    const int w = 24 + static_cast<int>(rng() % 40), h = 24 + static_cast<int>(rng() % 40);
    const BinaryMask m = cored_mask(w, h, kMaxRadius + 2, rng);
    BinaryMask prev_unknown;
    for (int r = 1; r <= kMaxRadius; ++r) {
      const Trimap t = mask_to_trimap(m, r);
      const BinaryMask fg = label_mask(t, Label::Foreground);
      const BinaryMask bg = label_mask(t, Label::Background);
      const BinaryMask unk = label_mask(t, Label::Unknown);
      const std::string at = "mask " + std::to_string(trial) + " r=" + std::to_string(r);
      c.expect(mask_count(fg) + mask_count(bg) + mask_count(unk) == t.size() &&
                   mask_count(mask_intersection(fg, bg)) == 0 && mask_count(mask_intersection(fg, unk)) == 0 &&
                   mask_count(mask_intersection(bg, unk)) == 0,
               at + ": not a partition");
      c.expect(mask_subset(oracle::erode(m, r), fg), at + ": eroded mask not foreground");
      c.expect(mask_count(mask_intersection(bg, m)) == 0, at + ": background meets the mask");
      if (r > 1) c.expect(mask_subset(prev_unknown, unk), at + ": unknown band shrank");
      prev_unknown = unk;
    }
  }
  return c.result();
}

Outcome solver_oracle() {
  Check c;
  std::mt19937_64 rng(303);
  const SolverParams params;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int w = 5 + static_cast<int>(rng() % 16), h = 5 + static_cast<int>(rng() % 16);
    const RgbImage img = oracle::random_image(w, h, rng);
    const Trimap t = oracle::random_trimap(w, h, rng);
    const AlphaMatte got = solve_alpha(img, t, params);
    const std::vector<double> want =
        oracle::dense_alpha(img, t, params.window_radius, params.epsilon, params.constraint_weight);
    double diff = 0.0;
    for (std::size_t i = 0; i < want.size(); ++i) diff = std::max(diff, std::abs(got[i] - want[i]));
    worst = std::max(worst, diff);
    c.expect(diff <= kSolverTolerance, std::to_string(w) + "x" + std::to_string(h) + " differs by " + fmt(diff));
  }
  c.note("max difference " + fmt(worst));
  return c.result();
}

Outcome laplacian_structure() {
  Check c;
  std::mt19937_64 rng(404);
  const SolverParams params;
  double worst_row = 0.0, min_eig = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const RgbImage img = oracle::random_image(8, 8, rng);
    const CsrMatrix l = build_matting_laplacian(img, params);
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(l.rows, l.rows);
    for (int i = 0; i < l.rows; ++i) {
      double sum = 0.0;
      for (int k = l.row_ptr[i]; k < l.row_ptr[i + 1]; ++k) {
        dense(i, l.cols[k]) = l.values[k];
        sum += l.values[k];
      }
      worst_row = std::max(worst_row, std::abs(sum));
    }
    c.expect(dense == dense.transpose(), "not exactly symmetric");
    const double e = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(dense).eigenvalues().minCoeff();
    min_eig = std::min(min_eig, e);
  }
  c.expect(worst_row <= kRowSumTolerance, "row sum " + fmt(worst_row));
  c.expect(min_eig >= kEigenTolerance, "min eigenvalue " + fmt(min_eig));
  c.note("max |row sum| " + fmt(worst_row) + ", min eigenvalue " + fmt(min_eig));
  return c.result();
}

Outcome patch_machinery() {
  Check c;
  std::mt19937_64 rng(505);
  constexpr int kRounds = 10;
  for (int trial = 0; trial < 20; ++trial) {
    const int w = 20 + static_cast<int>(rng() % 60), h = 20 + static_cast<int>(rng() % 60);
    const int patch = 4 + static_cast<int>(rng() % 16);
    const Trimap t = oracle::random_trimap(w, h, rng);
    for (int k = 0; k < kRounds; ++k) {
      const PatchPlan plan = sample_patch_centers(t, patch, mix_seed(trial, k));
      BinaryMask covered(w, h);
      for (const PatchRect& r : plan.rects) {
        for (int y = r.y; y < r.y + r.height; ++y) {
          for (int x = r.x; x < r.x + r.width; ++x) covered(x, y) = 1;
        }
      }
      c.expect(mask_subset(label_mask(t, Label::Unknown), covered),
               "trimap " + std::to_string(trial) + " round " + std::to_string(k) + " leaves unknown pixels uncovered");
    }

    std::vector<GrayMap> rounds;
    for (int k = 0; k < kRounds; ++k) {
      GrayMap g(w, h);
      for (auto& v : g.data()) v = (rng() % 7 == 0) ? std::nan("") : static_cast<double>(rng() % 1001) / 1000.0;
      rounds.push_back(std::move(g));
    }
    // Absent everywhere but one round would be fine; make sure no unknown pixel is absent in all rounds.
    for (std::size_t i = 0; i < t.size(); ++i) rounds[0][i] = is_absent(rounds[0][i]) ? 0.5 : rounds[0][i];
    const GrayMap med = multi_sample_median(rounds, t);
    std::vector<GrayMap> shuffled = rounds;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    c.expect(multi_sample_median(shuffled, t) == med, "median depends on round order");

    GrayMap one(w, h);
    for (auto& v : one.data()) v = static_cast<double>(rng() % 1001) / 1000.0;
    c.expect(multi_sample_median(std::vector<GrayMap>(kRounds, one), t) == one, "identical rounds altered");
  }
  return c.result();
}

Outcome synthetic_recovery() {
  Check c;
  const Fixture f = make_fixture(FixtureKind::Disk, 3, 0);
  PipelineConfig cfg;
  cfg.passes = 4;
  cfg.samples_k = 10;
  cfg.seed = 0;
  cfg.keep_history = true;
  const ReferenceBackend backend(cfg.solver);
  const InstanceAnnotation inst{"1", "disk", 1.0, f.scene.bbox, f.scene.coarse_mask};
  const InstanceMatteResult r = matte_instance(backend, f.scene.image, inst, {}, cfg);

  const MetricsReport final_metrics =
      compute_metrics(r.final_alpha, f.scene.gt_alpha, label_mask(r.per_pass.back().trimap, Label::Unknown),
                      MetricRegion::UnknownBand);
  c.expect(final_metrics.mse <= kRecoveryMse, "MSE " + fmt(final_metrics.mse));
  c.expect(std::abs(final_metrics.mse - kDiskMseBaseline) <= kBaselineSlack * kDiskMseBaseline,
           "MSE " + fmt(final_metrics.mse) + " drifted from baseline " + fmt(kDiskMseBaseline));

  // Boundary band of the ground truth; errors are taken on the mattes as written (8-bit).
  BinaryMask band(f.scene.gt_alpha.width(), f.scene.gt_alpha.height());
  for (std::size_t i = 0; i < band.size(); ++i) band[i] = f.scene.gt_alpha[i] > 0.0 && f.scene.gt_alpha[i] < 1.0;
  std::string trail;
  double previous = 0.0;
  for (std::size_t p = 0; p < r.per_pass.size(); ++p) {
    const MetricsReport m = compute_metrics(alpha_decode(alpha_encode(r.per_pass[p].alpha)), f.scene.gt_alpha, band);
    const double mean = m.sad / static_cast<double>(m.pixels);
    trail += (p ? " " : "") + fmt(mean);
    if (p > 0) c.expect(mean <= previous, "pass " + std::to_string(p + 1) + " error rose");
    previous = mean;
  }
  c.note("unknown-band MSE " + fmt(final_metrics.mse));
  c.note("per-pass band error [" + trail + "]");
  return c.result();
}

BinaryMask rect_mask(int w, int h, int x0, int y0, int x1, int y1) {
  BinaryMask m(w, h);
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) m(x, y) = 1;
  }
  return m;
}

Outcome multi_instance_isolation() {
  Check c;
  const int w = 160, h = 90;
  const BinaryMask left = rect_mask(w, h, 15, 20, 60, 70);
  const BinaryMask right = rect_mask(w, h, 95, 20, 140, 70);
  RgbImage image(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const bool obj = left(x, y) || right(x, y);
      image.at(x, y, 0) = obj ? 230 : 30;
      image.at(x, y, 1) = obj ? 150 : 70;
      image.at(x, y, 2) = obj ? 40 : 190;
    }
  }
  const std::vector<InstanceAnnotation> both = {{"L", "square", 1.0, mask_bounding_box(left), left},
                                                {"R", "square", 1.0, mask_bounding_box(right), right}};
  PipelineConfig cfg;
  const ReferenceBackend backend(cfg.solver);
  const auto out = matte_all(backend, image, both, cfg);
  const auto swapped = matte_all(backend, image, {both[1], both[0]}, cfg);
  for (const auto* o : {&out, &swapped}) {
    for (const auto& inst : *o) c.expect(inst.ok(), "instance " + inst.instance_id + " failed");
  }
  if (!c.result().pass) return c.result();

  double worst = 0.0;
  for (int i = 0; i < 2; ++i) {
    const InstanceAnnotation& other = both[1 - i];
    // The smallest per-pass radius gives the largest interior.
    const BinaryMask core = binary_erode(other.mask, pass_radius(both[i].bbox, cfg, cfg.passes - 1));
    for (std::size_t k = 0; k < core.size(); ++k) {
      if (core[k]) worst = std::max(worst, out[i].result->final_alpha[k]);
    }
  }
  c.expect(worst <= kIsolationAlpha, "alpha " + fmt(worst) + " inside the other instance");
  c.expect(swapped[0].instance_id == "R" && swapped[1].instance_id == "L", "swapped ids out of order");
  c.expect(swapped[0].result->final_alpha == out[1].result->final_alpha &&
               swapped[1].result->final_alpha == out[0].result->final_alpha,
           "results depend on instance order");
  c.note("max alpha inside the other interior " + fmt(worst));
  return c.result();
}

Outcome determinism() {
  Check c;
  const fs::path root = fs::temp_directory_path() / "instamatte_acceptance";
  fs::remove_all(root);
  const std::string cli = INSTAMATTE_CLI_PATH;
  c.expect(cli_runner::run(cli, {"synth", "--kind", "disk", "--out", (root / "scene").string()}) == 0, "synth failed");
  for (const char* run : {"a", "b"}) {
    c.expect(cli_runner::run(cli, {"matte", "--image", (root / "scene/image.png").string(), "--manifest",
                                   (root / "scene/manifest.json").string(), "--out", (root / run).string(),
                                   "--seed", "7", "--history"}) == 0,
             std::string("matte run ") + run + " failed");
  }
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(root / "a")) {
    const fs::path twin = root / "b" / entry.path().filename();
    const bool same = fs::exists(twin) && cli_runner::fnv1a(cli_runner::slurp(entry.path())) ==
                                              cli_runner::fnv1a(cli_runner::slurp(twin));
    c.expect(same, entry.path().filename().string() + " differs");
    ++files;
  }
  c.expect(files > 0, "no output files");
  c.expect(files == static_cast<std::size_t>(std::distance(fs::directory_iterator(root / "b"), fs::directory_iterator{})),
           "output file sets differ");
  c.note(std::to_string(files) + " files compared");
  fs::remove_all(root);
  return c.result();
}

Outcome interchange() {
  Check c;
  std::mt19937_64 rng(909);
  for (int trial = 0; trial < 50; ++trial) {
    const int w = 1 + static_cast<int>(rng() % 40), h = 1 + static_cast<int>(rng() % 40);
    Trimap t(w, h);
    for (auto& l : t.data()) l = static_cast<Label>(rng() % 3);
    c.expect(trimap_decode(trimap_encode(t)) == t, "trimap round trip");

    BinaryMask m(w, h);
    for (auto& v : m.data()) v = rng() % 2;
    c.expect(decode_rle(h, w, encode_rle(m)) == m, "RLE round trip");
  }
  int worst = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const RgbImage img = oracle::random_image(32, 24, rng);
    const RgbImage bg = oracle::random_image(32, 24, rng);
    AlphaMatte a(32, 24);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (auto& v : a.data()) v = unit(rng);
    const RgbImage direct = composite_pixelwise(img, bg, a);
    const RgbImage layered = over(extract_rgba(img, a), bg);
    for (std::size_t i = 0; i < direct.data().size(); ++i) {
      worst = std::max(worst, std::abs(int(direct.data()[i]) - int(layered.data()[i])));
    }
  }
  c.expect(worst <= kOverTolerance, "over differs by " + std::to_string(worst));
  c.note("max over-operator difference " + std::to_string(worst));
  return c.result();
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "pixelwise composite exactness", kLimit1, composite_exactness},
      {2, "trimap partition and geometry", kLimit2, trimap_suite},
      {3, "solver matches dense direct solve", kLimit3, solver_oracle},
      {4, "Laplacian structure", kLimit4, laplacian_structure},
      {5, "patch coverage and median aggregation", kLimit5, patch_machinery},
      {6, "end-to-end synthetic recovery", kLimit6, synthetic_recovery},
      {7, "multi-instance isolation", kLimit7, multi_instance_isolation},
      {8, "deterministic CLI output", kLimit8, determinism},
      {9, "interchange round trips", kLimit9, interchange},
  };
  int failed = 0;
  for (const Criterion& cr : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = cr.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > cr.limit_seconds) {
      o.pass = false;
      o.detail += (o.detail.empty() ? "" : "; ") + std::string("over the ") + fmt(cr.limit_seconds) + " s limit";
    }
    if (!o.pass) ++failed;
    std::printf("criterion %d %s: %s (%.2f s) %s\n", cr.id, cr.name, o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
