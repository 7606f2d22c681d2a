#include "instamatte/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "instamatte/parallel.hpp"
#include "instamatte/patcher.hpp"
#include "instamatte/trimap.hpp"

namespace instamatte {

void validate(const PipelineConfig& cfg) {
  if (cfg.passes < 1) throw Error(ErrorCode::InvalidArgument, "passes must be at least 1");
  if (cfg.samples_k < 1) throw Error(ErrorCode::InvalidArgument, "samples_k must be at least 1");
  if (cfg.patch_size < 1) throw Error(ErrorCode::InvalidArgument, "patch size must be positive");
  if (cfg.working_size.width < cfg.patch_size || cfg.working_size.height < cfg.patch_size) {
    throw Error(ErrorCode::InvalidArgument, "working size must be at least the patch size");
  }
  if (!(cfg.rate_decay > 0.0 && cfg.rate_decay <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "rate decay must lie in (0, 1]");
  }
  validate(TrimapParams{cfg.initial_rate, cfg.trimap_params.hi_threshold, cfg.trimap_params.lo_threshold});
  validate(cfg.solver);
}

void validate(const InstanceAnnotation& inst, int width, int height) {
  if (inst.mask.width() != width || inst.mask.height() != height) {
    throw Error(ErrorCode::DimensionMismatch, "instance " + inst.id + " mask dimensions differ from the image");
  }
  if (!bbox_within(inst.bbox, width, height)) {
    throw Error(ErrorCode::InvalidArgument, "instance " + inst.id + " bounding box lies outside the image");
  }
  if (mask_count(inst.mask) == 0) throw Error(ErrorCode::EmptyMask, "instance " + inst.id + " mask is empty");
}

int pass_radius(const BoundingBox& bbox, const PipelineConfig& cfg, int pass_index) {
  const double rate = cfg.initial_rate * std::pow(cfg.rate_decay, pass_index);
  return dilation_radius(bbox, rate);
}

namespace {

std::uint64_t hash_id(const std::string& id) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : id) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t pass_seed(std::uint64_t base, const std::string& instance_id, int pass) {
  return mix_seed(mix_seed(base, hash_id(instance_id)), static_cast<std::uint64_t>(pass));
}

InstanceMatteResult matte_instance(const MattingBackend& backend, const RgbImage& image,
                                   const InstanceAnnotation& inst, const std::vector<BinaryMask>& others,
                                   const PipelineConfig& cfg) {
  int pass = 0;
  auto stage = [&](auto&& fn) {
    try {
      return fn();
    } catch (const StageError&) {
      throw;
    } catch (const Error& e) {
      throw StageError(e.code(), inst.id, pass, e.what());
    } catch (const std::exception& e) {
      throw StageError(ErrorCode::BackendFailure, inst.id, pass, e.what());
    }
  };

  stage([&] {
    validate(cfg);
    validate(inst, image.width(), image.height());
    return 0;
  });

  InstanceMatteResult result;
  result.instance_id = inst.id;

  Trimap trimap = stage([&] {
    const int r = pass_radius(inst.bbox, cfg, 0);
    return suppress_other_instances(mask_to_trimap(inst.mask, r), others, r);
  });

  for (pass = 1; pass <= cfg.passes; ++pass) {
    AlphaMatte alpha = stage([&] {
      return run_patched(backend, image, trimap, cfg, pass_seed(cfg.seed, inst.id, pass));
    });
    if (cfg.keep_history) result.per_pass.push_back(PassRecord{trimap, alpha});
    if (pass < cfg.passes) {
      trimap = stage([&] {
        const int r = pass_radius(inst.bbox, cfg, pass);
        return suppress_other_instances(alpha_to_trimap(alpha, r, cfg.trimap_params), others, r);
      });
    }
    result.final_alpha = std::move(alpha);
  }
  return result;
}

bool InstanceFilter::accepts(const InstanceAnnotation& inst) const {
  if (inst.score < min_score) return false;
  return labels.empty() || std::find(labels.begin(), labels.end(), inst.label) != labels.end();
}

std::vector<InstanceOutcome> matte_all(const MattingBackend& backend, const RgbImage& image,
                                       const std::vector<InstanceAnnotation>& instances,
                                       const PipelineConfig& cfg, const InstanceFilter& filter) {
  if (instances.empty()) throw Error(ErrorCode::InvalidArgument, "no instances to matte");

  std::vector<std::size_t> selected;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (filter.accepts(instances[i])) selected.push_back(i);
  }

  std::vector<InstanceOutcome> outcomes(selected.size());
  // Rounds inside each instance already fan out across threads; running
  // instances concurrently as well only pays off with spare cores.
  const int threads = backend.reentrant() ? resolve_threads(cfg.threads) : 1;
  const int instance_threads = std::max(1, threads / std::max(1, cfg.samples_k));
  PipelineConfig inner = cfg;
  if (!backend.reentrant()) inner.threads = 1;

  parallel_for(selected.size(), instance_threads, [&](std::size_t s) {
    const std::size_t idx = selected[s];
    const InstanceAnnotation& inst = instances[idx];
    std::vector<BinaryMask> others;
    for (std::size_t j = 0; j < instances.size(); ++j) {
      if (j != idx) others.push_back(instances[j].mask);
    }
    InstanceOutcome& out = outcomes[s];
    out.instance_id = inst.id;
    try {
      out.result = matte_instance(backend, image, inst, others, inner);
    } catch (const StageError& e) {
      out.error = e;
    } catch (const Error& e) {
      out.error = StageError(e.code(), inst.id, 0, e.what());
    }
  });
  return outcomes;
}

}  // namespace instamatte
