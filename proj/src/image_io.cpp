#include "instamatte/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>
#include <vector>

namespace instamatte {

ByteRaster trimap_encode(const Trimap& t) {
  ByteRaster out(t.width(), t.height());
  for (std::size_t i = 0; i < t.size(); ++i) {
    switch (t[i]) {
      case Label::Background: out[i] = 0; break;
      case Label::Unknown: out[i] = 128; break;
      case Label::Foreground: out[i] = 255; break;
    }
  }
  return out;
}

Trimap trimap_decode(const ByteRaster& raster) {
  Trimap out(raster.width(), raster.height());
  for (std::size_t i = 0; i < raster.size(); ++i) {
    switch (raster[i]) {
      case 0: out[i] = Label::Background; break;
      case 128: out[i] = Label::Unknown; break;
      case 255: out[i] = Label::Foreground; break;
      default:
        throw Error(ErrorCode::MalformedTrimap,
                    "trimap byte " + std::to_string(raster[i]) + " at index " + std::to_string(i) +
                        " is not one of {0, 128, 255}");
    }
  }
  return out;
}

ByteRaster alpha_encode(const AlphaMatte& alpha) {
  ByteRaster out(alpha.width(), alpha.height());
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    const double v = std::clamp(alpha[i], 0.0, 1.0);
    out[i] = static_cast<std::uint8_t>(std::floor(v * 255.0 + 0.5));
  }
  return out;
}

AlphaMatte alpha_decode(const ByteRaster& raster) {
  AlphaMatte out(raster.width(), raster.height());
  for (std::size_t i = 0; i < raster.size(); ++i) out[i] = raster[i] / 255.0;
  return out;
}

ByteRaster mask_encode(const BinaryMask& m) {
  ByteRaster out(m.width(), m.height());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = m[i] ? 255 : 0;
  return out;
}

BinaryMask mask_decode(const ByteRaster& raster) {
  BinaryMask out(raster.width(), raster.height());
  for (std::size_t i = 0; i < raster.size(); ++i) out[i] = raster[i] ? 1 : 0;
  return out;
}

namespace {

struct PngImage {
  png_image image;

  PngImage() {
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&image); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;
};

std::vector<std::uint8_t> read_png(const std::filesystem::path& path, png_uint_32 format, int& width,
                                   int& height) {
  PngImage png;
  if (!png_image_begin_read_from_file(&png.image, path.string().c_str())) {
    throw Error(ErrorCode::Io, "cannot read PNG '" + path.string() + "': " + png.image.message);
  }
  png.image.format = format;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(png.image));
  if (!png_image_finish_read(&png.image, nullptr, buffer.data(), 0, nullptr)) {
    throw Error(ErrorCode::Io, "cannot decode PNG '" + path.string() + "': " + png.image.message);
  }
  width = static_cast<int>(png.image.width);
  height = static_cast<int>(png.image.height);
  return buffer;
}

void write_buffer(const std::filesystem::path& path, png_uint_32 format, int width, int height,
                  const std::uint8_t* data) {
  PngImage png;
  png.image.width = static_cast<png_uint_32>(width);
  png.image.height = static_cast<png_uint_32>(height);
  png.image.format = format;
  if (!png_image_write_to_file(&png.image, path.string().c_str(), 0, data, 0, nullptr)) {
    throw Error(ErrorCode::Io, "cannot write PNG '" + path.string() + "': " + png.image.message);
  }
}

}  // namespace

RgbImage read_rgb_png(const std::filesystem::path& path) {
  int w = 0, h = 0;
  auto data = read_png(path, PNG_FORMAT_RGB, w, h);
  return RgbImage(w, h, std::move(data));
}

RgbaImage read_rgba_png(const std::filesystem::path& path) {
  int w = 0, h = 0;
  auto data = read_png(path, PNG_FORMAT_RGBA, w, h);
  return RgbaImage(w, h, std::move(data));
}

ByteRaster read_gray_png(const std::filesystem::path& path) {
  int w = 0, h = 0;
  auto data = read_png(path, PNG_FORMAT_GRAY, w, h);
  return ByteRaster(w, h, std::move(data));
}

void write_png(const std::filesystem::path& path, const RgbImage& image) {
  write_buffer(path, PNG_FORMAT_RGB, image.width(), image.height(), image.data().data());
}

void write_png(const std::filesystem::path& path, const RgbaImage& image) {
  write_buffer(path, PNG_FORMAT_RGBA, image.width(), image.height(), image.data().data());
}

void write_png(const std::filesystem::path& path, const ByteRaster& gray) {
  write_buffer(path, PNG_FORMAT_GRAY, gray.width(), gray.height(), gray.data().data());
}

Trimap read_trimap_png(const std::filesystem::path& path) { return trimap_decode(read_gray_png(path)); }

AlphaMatte read_alpha_png(const std::filesystem::path& path) { return alpha_decode(read_gray_png(path)); }

BinaryMask read_mask_png(const std::filesystem::path& path) { return mask_decode(read_gray_png(path)); }

}  // namespace instamatte
