#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "instamatte/pipeline.hpp"
#include "instamatte/raster.hpp"

namespace instamatte {

// Uncompressed COCO-style RLE: column-major runs, background first.
BinaryMask decode_rle(int height, int width, const std::vector<std::int64_t>& counts);
std::vector<std::int64_t> encode_rle(const BinaryMask& m);

struct SceneManifest {
  std::string image_path;
  std::vector<InstanceAnnotation> instances;
};

// Parses and validates a scene manifest:
//
//   {
//     "image": "scene.png",                       // optional
//     "instances": [
//       {"id": "1", "label": "person", "score": 0.93,
//        "bbox": [x0, y0, x1, y1],                // optional, exclusive x1/y1
//        "mask": "person_mask.png"}               // or {"size": [h, w], "counts": [...]}
//     ]
//   }
//
// Mask paths resolve against `base_dir`. Every mask must be `width` x `height`.
SceneManifest parse_manifest(const nlohmann::json& doc, const std::filesystem::path& base_dir, int width,
                             int height);
SceneManifest parse_manifest(const std::string& text, const std::filesystem::path& base_dir, int width,
                             int height);
SceneManifest load_manifest(const std::filesystem::path& path, int width, int height);

}  // namespace instamatte
