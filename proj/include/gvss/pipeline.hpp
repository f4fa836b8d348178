#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gvss/clock.hpp"
#include "gvss/frame.hpp"

namespace gvss {

enum class Encoding { Jpeg, Png24, Png8, PngGray };
enum class FontSize { Small = 1, Medium = 2, Large = 3 };

// "jpeg", "png24", "png8", "pnggray"
const char* to_string(Encoding e);
std::optional<Encoding> parse_encoding(std::string_view s);
const char* media_type(Encoding e);
const char* file_extension(Encoding e);

inline constexpr int kMinTargetDim = 8;
inline constexpr int kMaxTargetDim = 4096;
inline constexpr int kJpegQuality = 75;

struct RenderSettings {
  int target_width = 320;
  int target_height = 240;
  bool constrain = true;
  Encoding encoding = Encoding::Jpeg;
  bool show_time = true;
  FontSize font_size = FontSize::Medium;

  // Throws Error(InvalidSettings) unless both targets are in [8, 4096].
  void validate() const;
};

struct EncodedImage {
  std::vector<std::uint8_t> bytes;
  std::string media_type;
  Encoding encoding = Encoding::Jpeg;
  int width = 0;
  int height = 0;
};

// Output size for a source under the given target, before any resampling.
struct Size {
  int width;
  int height;
  bool operator==(const Size&) const = default;
};
Size scaled_size(int src_width, int src_height, int target_width, int target_height,
                 bool constrain);

// Nearest-neighbour resample to scaled_size(). Same-size input is returned
// unchanged.
Frame scale(const Frame& frame, const RenderSettings& settings);

// Overlay geometry: 5x7 glyphs scaled by the font size, one column of
// spacing between glyphs, a black band 2px larger than the text on every
// side, anchored bottom-left.
int overlay_band_height(FontSize font);
int overlay_band_width(FontSize font, std::size_t glyphs);

// Draws "YYYY-MM-DD HH:MM:SS" (UTC) onto a black band at the bottom-left.
// Anything that does not fit is clipped.
Frame overlay_timestamp(const Frame& frame, WallTime time, FontSize font);

// Rec.601 luma, rounded half up: (299R + 587G + 114B + 500) / 1000.
std::uint8_t luma(Rgb c);

// Median-cut palette. Exact (sorted distinct colours) when the frame has at
// most max_colors colours.
struct Quantized {
  std::vector<Rgb> palette;
  std::vector<std::uint8_t> indices;
};
Quantized quantize(const Frame& frame, std::size_t max_colors = 256);

EncodedImage encode(const Frame& frame, Encoding encoding);

// ceil(w * h * bytes_per_pixel / compression_ratio) for the target size.
std::uint64_t approximate_image_size(const RenderSettings& settings);

// scale, then overlay (if show_time), then encode.
EncodedImage render(const Frame& frame, const RenderSettings& settings, WallTime time);

}  // namespace gvss
