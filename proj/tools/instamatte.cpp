// Command-line front end: matte, composite, synth, eval.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "instamatte/composite.hpp"
#include "instamatte/image_io.hpp"
#include "instamatte/manifest.hpp"
#include "instamatte/matting.hpp"
#include "instamatte/pipeline.hpp"

namespace fs = std::filesystem;
using namespace instamatte;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInstanceFailure = 1;
constexpr int kExitInvalidInput = 2;

std::vector<std::string> split_labels(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct MatteOptions {
  std::string image;
  std::string manifest;
  std::string labels;
  double min_score = 0.0;
  std::string backend = "reference";
  std::string background;
  std::string out;
  bool keep_aspect = false;
  int working = 640;
  PipelineConfig cfg;
};

int run_matte(const MatteOptions& o) {
  RgbImage image;
  SceneManifest scene;
  PipelineConfig cfg = o.cfg;
  cfg.working_size = Extent{o.working, o.working};
  cfg.resize_mode = o.keep_aspect ? ResizeMode::KeepAspect : ResizeMode::Stretch;
  std::unique_ptr<MattingBackend> backend;
  RgbImage background;
  try {
    validate(cfg);
    image = read_rgb_png(o.image);
    scene = load_manifest(o.manifest, image.width(), image.height());
    if (scene.instances.empty()) throw Error(ErrorCode::SchemaViolation, "manifest lists no instances");
    backend = make_backend(o.backend, cfg.solver);
    if (!o.background.empty()) {
      background = read_rgb_png(o.background);
      if (!background.same_shape(image)) {
        throw Error(ErrorCode::DimensionMismatch, "background dimensions differ from the image");
      }
    } else {
      background = RgbImage(image.width(), image.height(), 255);
    }
    fs::create_directories(o.out);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error [io]: " << e.what() << "\n";
    return kExitInvalidInput;
  }

  InstanceFilter filter;
  filter.labels = split_labels(o.labels);
  filter.min_score = o.min_score;

  const std::vector<InstanceOutcome> outcomes = matte_all(*backend, image, scene.instances, cfg, filter);

  const std::string stem = fs::path(o.image).stem().string();
  const fs::path out_dir(o.out);
  int status = kExitOk;
  std::vector<AlphaMatte> finished;
  try {
    for (const InstanceOutcome& outcome : outcomes) {
      if (!outcome.ok()) {
        std::cerr << "error [" << to_string(outcome.error->code()) << "]: " << outcome.error->what() << "\n";
        status = kExitInstanceFailure;
        continue;
      }
      const InstanceMatteResult& r = *outcome.result;
      const std::string prefix = stem + "_inst" + r.instance_id;
      write_png(out_dir / (prefix + "_alpha.png"), alpha_encode(r.final_alpha));
      write_png(out_dir / (prefix + "_rgba.png"), extract_rgba(image, r.final_alpha));
      for (std::size_t k = 0; k < r.per_pass.size(); ++k) {
        const std::string pass = std::to_string(k + 1);
        write_png(out_dir / (prefix + "_trimap_p" + pass + ".png"), trimap_encode(r.per_pass[k].trimap));
        write_png(out_dir / (prefix + "_alpha_p" + pass + ".png"), alpha_encode(r.per_pass[k].alpha));
      }
      std::cout << prefix << "_alpha.png\n";
      finished.push_back(r.final_alpha);
    }
    if (!finished.empty()) {
      write_png(out_dir / (stem + "_composite.png"), layer_composite(image, finished, background));
    }
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return kExitInvalidInput;
  }
  return status;
}

int run_composite(const std::string& image_path, const std::vector<std::string>& alphas,
                  const std::string& background_path, const std::string& out) {
  try {
    const RgbImage image = read_rgb_png(image_path);
    const RgbImage background = read_rgb_png(background_path);
    std::vector<AlphaMatte> mattes;
    for (const auto& a : alphas) mattes.push_back(read_alpha_png(a));
    write_png(out, layer_composite(image, mattes, background));
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return kExitInvalidInput;
  }
  return kExitOk;
}

int run_synth(const std::string& kind, int perturb, std::uint64_t seed, const std::string& out) {
  try {
    const Fixture f = make_fixture(parse_fixture_kind(kind), perturb, seed);
    const fs::path dir(out);
    fs::create_directories(dir);
    write_png(dir / "image.png", f.scene.image);
    write_png(dir / "gt_alpha.png", alpha_encode(f.scene.gt_alpha));
    write_png(dir / "coarse_mask.png", mask_encode(f.scene.coarse_mask));
    write_png(dir / "background.png", f.background);
    const BoundingBox& b = f.scene.bbox;
    nlohmann::json manifest = {
        {"image", "image.png"},
        {"instances",
         nlohmann::json::array({{{"id", "1"},
                                 {"label", kind},
                                 {"score", 1.0},
                                 {"bbox", {b.x0, b.y0, b.x1, b.y1}},
                                 {"mask", "coarse_mask.png"}}})}};
    std::ofstream(dir / "manifest.json") << manifest.dump(2) << "\n";
    std::cout << (dir / "manifest.json").string() << "\n";
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error [io]: " << e.what() << "\n";
    return kExitInvalidInput;
  }
  return kExitOk;
}

int run_eval(const std::string& alpha_path, const std::string& gt_path, const std::string& region,
             const std::string& trimap_path, bool json) {
  try {
    const AlphaMatte alpha = read_alpha_png(alpha_path);
    const AlphaMatte gt = read_alpha_png(gt_path);
    BinaryMask mask;
    MetricRegion kind = MetricRegion::All;
    if (region == "all") {
      mask = BinaryMask(alpha.width(), alpha.height(), 1);
    } else {
      if (trimap_path.empty()) throw Error(ErrorCode::InvalidArgument, "--region unknown requires --trimap");
      mask = label_mask(read_trimap_png(trimap_path), Label::Unknown);
      kind = MetricRegion::UnknownBand;
    }
    const MetricsReport m = compute_metrics(alpha, gt, mask, kind);
    std::cout << (json ? format_metrics_json(m) : format_metrics_text(m));
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return kExitInvalidInput;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Automatic instance matting and compositing"};
  app.require_subcommand(1);

  MatteOptions mo;
  auto* matte = app.add_subcommand("matte", "Estimate per-instance alpha mattes from coarse masks");
  matte->add_option("--image", mo.image, "Input RGB PNG")->required();
  matte->add_option("--manifest", mo.manifest, "Scene manifest JSON")->required();
  matte->add_option("--labels", mo.labels, "Comma-separated class labels to keep");
  matte->add_option("--min-score", mo.min_score, "Skip instances scoring below this")->capture_default_str();
  matte->add_option("--passes", mo.cfg.passes, "Feedback passes")->capture_default_str();
  matte->add_option("--k", mo.cfg.samples_k, "Sampling rounds per pass")->capture_default_str();
  matte->add_option("--patch", mo.cfg.patch_size, "Patch side in pixels")->capture_default_str();
  matte->add_option("--working", mo.working, "Working resolution side in pixels")->capture_default_str();
  matte->add_flag("--keep-aspect", mo.keep_aspect, "Preserve aspect ratio when downsampling");
  matte->add_option("--rate", mo.cfg.initial_rate, "Initial dilation rate")->capture_default_str();
  matte->add_option("--decay", mo.cfg.rate_decay, "Dilation rate decay per pass")->capture_default_str();
  matte->add_option("--hi", mo.cfg.trimap_params.hi_threshold, "Foreground alpha threshold")->capture_default_str();
  matte->add_option("--lo", mo.cfg.trimap_params.lo_threshold, "Background alpha threshold")->capture_default_str();
  matte->add_option("--seed", mo.cfg.seed, "Random seed")->capture_default_str();
  matte->add_option("--threads", mo.cfg.threads, "Worker threads (0 = all cores)")->capture_default_str();
  matte->add_flag("--history", mo.cfg.keep_history, "Write per-pass trimaps and alphas");
  matte->add_option("--backend", mo.backend, "reference or exec:<path>")->capture_default_str();
  matte->add_option("--background", mo.background, "Background PNG for the composite (default white)");
  matte->add_option("--out", mo.out, "Output directory")->required();

  std::string c_image, c_background, c_out;
  std::vector<std::string> c_alphas;
  auto* composite = app.add_subcommand("composite", "Layer alpha mattes of an image over a new background");
  composite->add_option("--image", c_image, "Input RGB PNG")->required();
  composite->add_option("--alphas", c_alphas, "Alpha PNGs, composited in order")->required();
  composite->add_option("--background", c_background, "Background RGB PNG")->required();
  composite->add_option("--out", c_out, "Output PNG")->required();

  std::string s_kind = "disk", s_out;
  int s_perturb = 3;
  std::uint64_t s_seed = 0;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic scene with ground-truth alpha");
  synth->add_option("--kind", s_kind, "disk, rect or motion-bar")
      ->check(CLI::IsMember({"disk", "rect", "motion-bar"}))
      ->capture_default_str();
  synth->add_option("--perturb", s_perturb, "Coarse mask perturbation radius")->capture_default_str();
  synth->add_option("--seed", s_seed, "Random seed")->capture_default_str();
  synth->add_option("--out", s_out, "Output directory")->required();

  std::string e_alpha, e_gt, e_region = "unknown", e_trimap;
  bool e_json = false;
  auto* eval = app.add_subcommand("eval", "Score an alpha matte against ground truth");
  eval->add_option("--alpha", e_alpha, "Estimated alpha PNG")->required();
  eval->add_option("--gt", e_gt, "Ground-truth alpha PNG")->required();
  eval->add_option("--region", e_region, "unknown or all")
      ->check(CLI::IsMember({"unknown", "all"}))
      ->capture_default_str();
  eval->add_option("--trimap", e_trimap, "Trimap PNG defining the unknown region");
  eval->add_flag("--json", e_json, "Emit JSON instead of metric=value lines");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalidInput;
  }

  if (*matte) return run_matte(mo);
  if (*composite) return run_composite(c_image, c_alphas, c_background, c_out);
  if (*synth) return run_synth(s_kind, s_perturb, s_seed, s_out);
  return run_eval(e_alpha, e_gt, e_region, e_trimap, e_json);
}
