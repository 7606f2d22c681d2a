#pragma once

#include <cstdint>
#include <filesystem>

#include "instamatte/raster.hpp"

namespace instamatte {

using ByteRaster = Plane<std::uint8_t>;

// Trimap byte encoding: Background 0, Unknown 128, Foreground 255.
ByteRaster trimap_encode(const Trimap& t);
// Throws MalformedTrimap on any byte outside {0, 128, 255}.
Trimap trimap_decode(const ByteRaster& raster);

// Alpha quantization: v = round(255 * alpha); decoding is v / 255.
ByteRaster alpha_encode(const AlphaMatte& alpha);
AlphaMatte alpha_decode(const ByteRaster& raster);

// 0 is background, any nonzero byte is foreground. Encoding writes 0 / 255.
ByteRaster mask_encode(const BinaryMask& m);
BinaryMask mask_decode(const ByteRaster& raster);

// PNG files via libpng. Readers convert from whatever the file stores.
RgbImage read_rgb_png(const std::filesystem::path& path);
RgbaImage read_rgba_png(const std::filesystem::path& path);
ByteRaster read_gray_png(const std::filesystem::path& path);

void write_png(const std::filesystem::path& path, const RgbImage& image);
void write_png(const std::filesystem::path& path, const RgbaImage& image);
void write_png(const std::filesystem::path& path, const ByteRaster& gray);

Trimap read_trimap_png(const std::filesystem::path& path);
AlphaMatte read_alpha_png(const std::filesystem::path& path);
BinaryMask read_mask_png(const std::filesystem::path& path);

}  // namespace instamatte
