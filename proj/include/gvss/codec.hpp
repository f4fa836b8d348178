#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "gvss/frame.hpp"

namespace gvss::codec {

using Bytes = std::vector<std::uint8_t>;

Bytes encode_jpeg(const Frame& frame, int quality);
Bytes encode_png_rgb(const Frame& frame);
// width*height samples, one byte each.
Bytes encode_png_gray(int width, int height, std::span<const std::uint8_t> samples);
// width*height palette indices plus a palette of 1..256 entries.
Bytes encode_png_indexed(int width, int height, std::span<const std::uint8_t> indices,
                         std::span<const Rgb> palette);

// Decodes any PNG to 8-bit RGB. Throws Error(InvalidSettings) on bad data.
Frame decode_png(std::span<const std::uint8_t> bytes);
// Binary PPM (P6, maxval 255).
Frame decode_ppm(std::span<const std::uint8_t> bytes);
// Dispatches on extension (.png or .ppm).
Frame load_image(const std::filesystem::path& path);

}  // namespace gvss::codec
