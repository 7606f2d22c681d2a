#pragma once

#include <cstdint>

#include "instamatte/matting.hpp"
#include "instamatte/raster.hpp"
#include "instamatte/trimap.hpp"

namespace instamatte {

enum class ResizeMode {
  // Stretch to exactly the working size.
  Stretch,
  // Scale uniformly so the image fits inside the working size.
  KeepAspect,
};

struct PipelineConfig {
  int passes = 4;
  int samples_k = 10;
  int patch_size = 320;
  Extent working_size{640, 640};
  ResizeMode resize_mode = ResizeMode::Stretch;
  double initial_rate = 0.10;
  double rate_decay = 0.5;
  TrimapParams trimap_params{};
  SolverParams solver{};
  std::uint64_t seed = 0;
  bool keep_history = false;
  // Worker threads for rounds and instances; 0 picks the hardware concurrency.
  int threads = 0;
};

void validate(const PipelineConfig& cfg);

}  // namespace instamatte
