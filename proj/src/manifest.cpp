#include "instamatte/manifest.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "instamatte/image_io.hpp"

namespace instamatte {

BinaryMask decode_rle(int height, int width, const std::vector<std::int64_t>& counts) {
  if (height < 1 || width < 1) throw Error(ErrorCode::InvalidArgument, "RLE size must be positive");
  const std::int64_t total = static_cast<std::int64_t>(height) * width;
  std::int64_t sum = 0;
  for (std::int64_t c : counts) {
    if (c < 0) throw Error(ErrorCode::InvalidArgument, "RLE counts must be non-negative");
    sum += c;
  }
  if (sum != total) {
    throw Error(ErrorCode::RleLengthMismatch,
                "RLE counts sum to " + std::to_string(sum) + " but the mask has " + std::to_string(total) + " pixels");
  }
  BinaryMask m(width, height);
  std::int64_t pos = 0;
  for (std::size_t run = 0; run < counts.size(); ++run) {
    const bool fg = run % 2 == 1;
    for (std::int64_t k = 0; k < counts[run]; ++k, ++pos) {
      if (fg) m(static_cast<int>(pos / height), static_cast<int>(pos % height)) = 1;
    }
  }
  return m;
}

std::vector<std::int64_t> encode_rle(const BinaryMask& m) {
  std::vector<std::int64_t> counts;
  bool current = false;
  std::int64_t run = 0;
  for (int x = 0; x < m.width(); ++x) {
    for (int y = 0; y < m.height(); ++y) {
      const bool v = m(x, y) != 0;
      if (v != current) {
        counts.push_back(run);
        run = 0;
        current = v;
      }
      ++run;
    }
  }
  counts.push_back(run);
  return counts;
}

namespace {

[[noreturn]] void schema_error(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::SchemaViolation, "manifest field '" + field + "': " + why);
}

std::string read_id(const nlohmann::json& v, const std::string& field) {
  if (v.is_string()) {
    if (v.get<std::string>().empty()) schema_error(field, "must not be empty");
    return v.get<std::string>();
  }
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  schema_error(field, "must be a string or an integer");
}

BinaryMask read_mask(const nlohmann::json& v, const std::string& field, const std::filesystem::path& base_dir) {
  if (v.is_string()) {
    const std::filesystem::path p = base_dir / v.get<std::string>();
    try {
      return read_mask_png(p);
    } catch (const Error& e) {
      schema_error(field, e.what());
    }
  }
  if (!v.is_object()) schema_error(field, "must be a file path or an RLE object");
  if (!v.contains("size") || !v["size"].is_array() || v["size"].size() != 2 || !v["size"][0].is_number_integer() ||
      !v["size"][1].is_number_integer()) {
    schema_error(field + ".size", "must be [height, width]");
  }
  if (!v.contains("counts") || !v["counts"].is_array()) {
    schema_error(field + ".counts", "must be an array of run lengths (compressed RLE strings are not supported)");
  }
  std::vector<std::int64_t> counts;
  for (const auto& c : v["counts"]) {
    if (!c.is_number_integer()) schema_error(field + ".counts", "run lengths must be integers");
    counts.push_back(c.get<std::int64_t>());
  }
  const auto h = v["size"][0].get<std::int64_t>();
  const auto w = v["size"][1].get<std::int64_t>();
  if (h < 1 || w < 1 || h > (1 << 20) || w > (1 << 20)) schema_error(field + ".size", "out of range");
  return decode_rle(static_cast<int>(h), static_cast<int>(w), counts);
}

}  // namespace

SceneManifest parse_manifest(const nlohmann::json& doc, const std::filesystem::path& base_dir, int width,
                             int height) {
  if (!doc.is_object()) schema_error("<root>", "must be an object");
  SceneManifest scene;
  if (doc.contains("image")) {
    if (!doc["image"].is_string()) schema_error("image", "must be a string");
    scene.image_path = doc["image"].get<std::string>();
  }
  if (!doc.contains("instances") || !doc["instances"].is_array()) schema_error("instances", "must be an array");

  std::set<std::string> seen;
  const auto& list = doc["instances"];
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto& item = list[i];
    const std::string where = "instances[" + std::to_string(i) + "]";
    if (!item.is_object()) schema_error(where, "must be an object");

    InstanceAnnotation inst;
    if (!item.contains("id")) schema_error(where + ".id", "is required");
    inst.id = read_id(item["id"], where + ".id");
    if (!seen.insert(inst.id).second) {
      throw Error(ErrorCode::DuplicateId, "duplicate instance id '" + inst.id + "'");
    }

    if (item.contains("label")) {
      if (!item["label"].is_string()) schema_error(where + ".label", "must be a string");
      inst.label = item["label"].get<std::string>();
    }
    if (item.contains("score")) {
      if (!item["score"].is_number()) schema_error(where + ".score", "must be a number");
      inst.score = item["score"].get<double>();
      if (!(inst.score >= 0.0 && inst.score <= 1.0)) schema_error(where + ".score", "must lie in [0, 1]");
    }

    if (!item.contains("mask")) schema_error(where + ".mask", "is required");
    inst.mask = read_mask(item["mask"], where + ".mask", base_dir);
    if (inst.mask.width() != width || inst.mask.height() != height) {
      throw Error(ErrorCode::DimensionMismatch,
                  where + ".mask is " + std::to_string(inst.mask.width()) + "x" + std::to_string(inst.mask.height()) +
                      " but the image is " + std::to_string(width) + "x" + std::to_string(height));
    }
    if (mask_count(inst.mask) == 0) throw Error(ErrorCode::EmptyMask, where + ".mask is empty");

    if (item.contains("bbox")) {
      const auto& b = item["bbox"];
      if (!b.is_array() || b.size() != 4) schema_error(where + ".bbox", "must be [x0, y0, x1, y1]");
      for (const auto& v : b) {
        if (!v.is_number_integer()) schema_error(where + ".bbox", "coordinates must be integers");
      }
      inst.bbox = BoundingBox{b[0].get<int>(), b[1].get<int>(), b[2].get<int>(), b[3].get<int>()};
      if (!bbox_within(inst.bbox, width, height)) {
        schema_error(where + ".bbox", "must satisfy x1 > x0, y1 > y0 and lie inside the image");
      }
    } else {
      inst.bbox = mask_bounding_box(inst.mask);
    }
    scene.instances.push_back(std::move(inst));
  }
  return scene;
}

SceneManifest parse_manifest(const std::string& text, const std::filesystem::path& base_dir, int width,
                             int height) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("manifest is not valid JSON: ") + e.what());
  }
  return parse_manifest(doc, base_dir, width, height);
}

SceneManifest load_manifest(const std::filesystem::path& path, int width, int height) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open manifest '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str(), path.parent_path(), width, height);
}

}  // namespace instamatte
