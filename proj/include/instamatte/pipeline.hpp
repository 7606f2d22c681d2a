#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "instamatte/config.hpp"
#include "instamatte/matting.hpp"
#include "instamatte/raster.hpp"

namespace instamatte {

struct InstanceAnnotation {
  std::string id;
  std::string label;
  double score = 1.0;
  BoundingBox bbox;
  BinaryMask mask;
};

void validate(const InstanceAnnotation& inst, int width, int height);

struct PassRecord {
  // Trimap fed into the pass and the alpha it produced.
  Trimap trimap;
  AlphaMatte alpha;
};

struct InstanceMatteResult {
  std::string instance_id;
  AlphaMatte final_alpha;
  std::vector<PassRecord> per_pass;
};

// Trimap dilation radius used for the trimap consumed by pass `pass_index`
// (0-based): the initial rate decayed geometrically, floored at one pixel.
int pass_radius(const BoundingBox& bbox, const PipelineConfig& cfg, int pass_index);

// Seed handed to run_patched() for a given instance and 1-based pass.
std::uint64_t pass_seed(std::uint64_t base, const std::string& instance_id, int pass);

// Feedback matting of one instance. Stage failures surface as StageError.
InstanceMatteResult matte_instance(const MattingBackend& backend, const RgbImage& image,
                                   const InstanceAnnotation& inst, const std::vector<BinaryMask>& others,
                                   const PipelineConfig& cfg);

struct InstanceOutcome {
  std::string instance_id;
  std::optional<InstanceMatteResult> result;
  // Set when the instance failed; other instances are unaffected.
  std::optional<StageError> error;

  bool ok() const noexcept { return result.has_value(); }
};

struct InstanceFilter {
  // Empty keeps every label.
  std::vector<std::string> labels;
  double min_score = 0.0;

  bool accepts(const InstanceAnnotation& inst) const;
};

// One instance at a time, every other annotated instance acting as a
// suppressor. Outcomes follow input order; filtered-out instances are
// dropped from the output but still suppress the others.
std::vector<InstanceOutcome> matte_all(const MattingBackend& backend, const RgbImage& image,
                                       const std::vector<InstanceAnnotation>& instances,
                                       const PipelineConfig& cfg, const InstanceFilter& filter = {});

}  // namespace instamatte
