#include "gvss/pipeline.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <unordered_map>

#include "gvss/codec.hpp"
#include "gvss/error.hpp"

namespace gvss {

const char* to_string(Encoding e) {
  switch (e) {
    case Encoding::Jpeg: return "jpeg";
    case Encoding::Png24: return "png24";
    case Encoding::Png8: return "png8";
    case Encoding::PngGray: return "pnggray";
  }
  return "jpeg";
}

std::optional<Encoding> parse_encoding(std::string_view s) {
  if (s == "jpeg") return Encoding::Jpeg;
  if (s == "png24") return Encoding::Png24;
  if (s == "png8") return Encoding::Png8;
  if (s == "pnggray") return Encoding::PngGray;
  return std::nullopt;
}

const char* media_type(Encoding e) {
  return e == Encoding::Jpeg ? "image/jpeg" : "image/png";
}

const char* file_extension(Encoding e) { return e == Encoding::Jpeg ? "jpg" : "png"; }

void RenderSettings::validate() const {
  auto in_range = [](int v) { return v >= kMinTargetDim && v <= kMaxTargetDim; };
  if (!in_range(target_width) || !in_range(target_height)) {
    throw Error(ErrorCode::InvalidSettings,
                "target size must be within 8x8 .. 4096x4096, got " +
                    std::to_string(target_width) + "x" + std::to_string(target_height));
  }
  const int font = static_cast<int>(font_size);
  if (font < 1 || font > 3) throw Error(ErrorCode::InvalidSettings, "font size must be 1..3");
}

Size scaled_size(int sw, int sh, int tw, int th, bool constrain) {
  if (!constrain) return {tw, th};
  // Compare tw/sw with th/sh exactly and scale by the smaller ratio.
  const auto lw = static_cast<std::int64_t>(tw) * sh;
  const auto lh = static_cast<std::int64_t>(th) * sw;
  std::int64_t w = 0;
  std::int64_t h = 0;
  if (lw <= lh) {
    w = tw;
    h = static_cast<std::int64_t>(sh) * tw / sw;
  } else {
    h = th;
    w = static_cast<std::int64_t>(sw) * th / sh;
  }
  return {static_cast<int>(std::max<std::int64_t>(w, 1)),
          static_cast<int>(std::max<std::int64_t>(h, 1))};
}

Frame scale(const Frame& frame, const RenderSettings& settings) {
  const Size out = scaled_size(frame.width(), frame.height(), settings.target_width,
                               settings.target_height, settings.constrain);
  if (out.width == frame.width() && out.height == frame.height()) return frame;

  const auto sw = static_cast<std::int64_t>(frame.width());
  const auto sh = static_cast<std::int64_t>(frame.height());
  std::vector<int> src_x(static_cast<std::size_t>(out.width));
  for (int x = 0; x < out.width; ++x) {
    src_x[static_cast<std::size_t>(x)] = static_cast<int>((2 * x + 1) * sw / (2 * out.width));
  }
  std::vector<std::uint8_t> px(static_cast<std::size_t>(out.width) * out.height * 3);
  const auto src = frame.pixels();
  std::size_t o = 0;
  for (int y = 0; y < out.height; ++y) {
    const auto sy = static_cast<std::size_t>((2 * y + 1) * sh / (2 * out.height));
    const std::size_t row = sy * static_cast<std::size_t>(sw) * 3;
    for (int x = 0; x < out.width; ++x) {
      const std::size_t i = row + static_cast<std::size_t>(src_x[static_cast<std::size_t>(x)]) * 3;
      px[o++] = src[i];
      px[o++] = src[i + 1];
      px[o++] = src[i + 2];
    }
  }
  return Frame(out.width, out.height, std::move(px), frame.captured_at(), frame.sequence());
}

namespace {

constexpr int kGlyphW = 5;
constexpr int kGlyphH = 7;
constexpr int kMargin = 2;

// Rows top to bottom, bit 4 is the leftmost column.
using Glyph = std::array<std::uint8_t, kGlyphH>;

const Glyph& glyph_for(char c) {
  static const Glyph kBlank{};
  static const std::map<char, Glyph> kFont = {
      {'0', {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E}},
      {'1', {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E}},
      {'2', {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F}},
      {'3', {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E}},
      {'4', {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02}},
      {'5', {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E}},
      {'6', {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E}},
      {'7', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}},
      {'8', {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E}},
      {'9', {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C}},
      {'-', {0x00, 0x00, 0x00, 0x1F, 0x00, 0x00, 0x00}},
      {':', {0x00, 0x0C, 0x0C, 0x00, 0x0C, 0x0C, 0x00}},
  };
  const auto it = kFont.find(c);
  return it == kFont.end() ? kBlank : it->second;
}

}  // namespace

int overlay_band_height(FontSize font) {
  return kGlyphH * static_cast<int>(font) + 2 * kMargin;
}

int overlay_band_width(FontSize font, std::size_t glyphs) {
  const int s = static_cast<int>(font);
  const int n = static_cast<int>(glyphs);
  const int text = n > 0 ? n * (kGlyphW + 1) * s - s : 0;
  return text + 2 * kMargin;
}

Frame overlay_timestamp(const Frame& frame, WallTime time, FontSize font) {
  Frame out = frame;
  const std::string text = overlay_time_text(time);
  const int s = static_cast<int>(font);
  const int w = out.width();
  const int h = out.height();

  const int band_top = std::max(0, h - overlay_band_height(font));
  const int band_right = std::min(w, overlay_band_width(font, text.size()));
  for (int y = band_top; y < h; ++y) {
    for (int x = 0; x < band_right; ++x) out.set(x, y, Rgb{0, 0, 0});
  }

  const int text_top = h - kMargin - kGlyphH * s;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const Glyph& g = glyph_for(text[i]);
    const int left = kMargin + static_cast<int>(i) * (kGlyphW + 1) * s;
    for (int gy = 0; gy < kGlyphH; ++gy) {
      for (int gx = 0; gx < kGlyphW; ++gx) {
        if (!(g[static_cast<std::size_t>(gy)] & (0x10 >> gx))) continue;
        for (int dy = 0; dy < s; ++dy) {
          const int y = text_top + gy * s + dy;
          if (y < 0 || y >= h) continue;
          for (int dx = 0; dx < s; ++dx) {
            const int x = left + gx * s + dx;
            if (x >= 0 && x < w) out.set(x, y, Rgb{255, 255, 255});
          }
        }
      }
    }
  }
  return out;
}

std::uint8_t luma(Rgb c) {
  const std::uint32_t weighted = 299u * c.r + 587u * c.g + 114u * c.b;
  return static_cast<std::uint8_t>((weighted + 500u) / 1000u);
}

namespace {

std::uint32_t pack(Rgb c) {
  return (static_cast<std::uint32_t>(c.r) << 16) | (static_cast<std::uint32_t>(c.g) << 8) | c.b;
}

Rgb unpack(std::uint32_t v) {
  return {static_cast<std::uint8_t>(v >> 16), static_cast<std::uint8_t>(v >> 8),
          static_cast<std::uint8_t>(v)};
}

struct ColorCount {
  Rgb color;
  std::uint64_t count;
};

struct Box {
  std::vector<ColorCount> colors;

  std::array<int, 3> range() const {
    std::array<int, 3> lo{255, 255, 255};
    std::array<int, 3> hi{0, 0, 0};
    for (const auto& cc : colors) {
      const std::array<int, 3> v{cc.color.r, cc.color.g, cc.color.b};
      for (int k = 0; k < 3; ++k) {
        lo[k] = std::min(lo[k], v[k]);
        hi[k] = std::max(hi[k], v[k]);
      }
    }
    return {hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]};
  }

  Rgb mean() const {
    std::uint64_t sum[3] = {0, 0, 0};
    std::uint64_t n = 0;
    for (const auto& cc : colors) {
      sum[0] += cc.color.r * cc.count;
      sum[1] += cc.color.g * cc.count;
      sum[2] += cc.color.b * cc.count;
      n += cc.count;
    }
    auto avg = [n](std::uint64_t s) { return static_cast<std::uint8_t>((s + n / 2) / n); };
    return {avg(sum[0]), avg(sum[1]), avg(sum[2])};
  }
};

int channel(Rgb c, int k) { return k == 0 ? c.r : (k == 1 ? c.g : c.b); }

std::vector<Box> median_cut(std::vector<ColorCount> colors, std::size_t max_boxes) {
  std::vector<Box> boxes;
  boxes.push_back(Box{std::move(colors)});
  while (boxes.size() < max_boxes) {
    // Split the box with the widest channel extent.
    int best = -1;
    int best_extent = 0;
    int best_channel = 0;
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      if (boxes[i].colors.size() < 2) continue;
      const auto r = boxes[i].range();
      for (int k = 0; k < 3; ++k) {
        if (r[static_cast<std::size_t>(k)] > best_extent) {
          best_extent = r[static_cast<std::size_t>(k)];
          best = static_cast<int>(i);
          best_channel = k;
        }
      }
    }
    if (best < 0) break;

    auto& cs = boxes[static_cast<std::size_t>(best)].colors;
    std::sort(cs.begin(), cs.end(), [k = best_channel](const ColorCount& a, const ColorCount& b) {
      const int ca = channel(a.color, k);
      const int cb = channel(b.color, k);
      return ca != cb ? ca < cb : pack(a.color) < pack(b.color);
    });
    std::uint64_t total = 0;
    for (const auto& cc : cs) total += cc.count;
    std::uint64_t running = 0;
    std::size_t cut = 1;
    for (std::size_t i = 0; i + 1 < cs.size(); ++i) {
      running += cs[i].count;
      cut = i + 1;
      if (running * 2 >= total) break;
    }
    Box upper{std::vector<ColorCount>(cs.begin() + static_cast<long>(cut), cs.end())};
    cs.resize(cut);
    boxes.push_back(std::move(upper));
  }
  return boxes;
}

}  // namespace

Quantized quantize(const Frame& frame, std::size_t max_colors) {
  if (max_colors < 1 || max_colors > 256) {
    throw Error(ErrorCode::InvalidSettings, "palette size must be 1..256");
  }
  std::unordered_map<std::uint32_t, std::uint64_t> histogram;
  const auto px = frame.pixels();
  for (std::size_t i = 0; i < px.size(); i += 3) {
    ++histogram[pack({px[i], px[i + 1], px[i + 2]})];
  }

  std::vector<std::uint32_t> keys;
  keys.reserve(histogram.size());
  for (const auto& [k, n] : histogram) keys.push_back(k);
  std::sort(keys.begin(), keys.end());

  Quantized q;
  std::unordered_map<std::uint32_t, std::uint8_t> lookup;
  if (keys.size() <= max_colors) {
    for (std::size_t i = 0; i < keys.size(); ++i) {
      q.palette.push_back(unpack(keys[i]));
      lookup[keys[i]] = static_cast<std::uint8_t>(i);
    }
  } else {
    std::vector<ColorCount> colors;
    colors.reserve(keys.size());
    for (auto k : keys) colors.push_back({unpack(k), histogram[k]});
    const auto boxes = median_cut(std::move(colors), max_colors);
    for (std::size_t b = 0; b < boxes.size(); ++b) {
      q.palette.push_back(boxes[b].mean());
      for (const auto& cc : boxes[b].colors) lookup[pack(cc.color)] = static_cast<std::uint8_t>(b);
    }
  }

  q.indices.reserve(px.size() / 3);
  for (std::size_t i = 0; i < px.size(); i += 3) {
    q.indices.push_back(lookup.at(pack({px[i], px[i + 1], px[i + 2]})));
  }
  return q;
}

EncodedImage encode(const Frame& frame, Encoding encoding) {
  EncodedImage out;
  out.media_type = media_type(encoding);
  out.encoding = encoding;
  out.width = frame.width();
  out.height = frame.height();
  switch (encoding) {
    case Encoding::Jpeg:
      out.bytes = codec::encode_jpeg(frame, kJpegQuality);
      break;
    case Encoding::Png24:
      out.bytes = codec::encode_png_rgb(frame);
      break;
    case Encoding::Png8: {
      const Quantized q = quantize(frame);
      out.bytes = codec::encode_png_indexed(frame.width(), frame.height(), q.indices, q.palette);
      break;
    }
    case Encoding::PngGray: {
      const auto px = frame.pixels();
      std::vector<std::uint8_t> gray;
      gray.reserve(px.size() / 3);
      for (std::size_t i = 0; i < px.size(); i += 3) {
        gray.push_back(luma({px[i], px[i + 1], px[i + 2]}));
      }
      out.bytes = codec::encode_png_gray(frame.width(), frame.height(), gray);
      break;
    }
  }
  return out;
}

std::uint64_t approximate_image_size(const RenderSettings& settings) {
  std::uint64_t bytes_per_pixel = 1;
  std::uint64_t ratio = 2;
  switch (settings.encoding) {
    case Encoding::Jpeg: bytes_per_pixel = 3; ratio = 12; break;
    case Encoding::Png24: bytes_per_pixel = 3; ratio = 2; break;
    case Encoding::Png8: bytes_per_pixel = 1; ratio = 2; break;
    case Encoding::PngGray: bytes_per_pixel = 1; ratio = 2; break;
  }
  const std::uint64_t raw = static_cast<std::uint64_t>(settings.target_width) *
                            static_cast<std::uint64_t>(settings.target_height) * bytes_per_pixel;
  return (raw + ratio - 1) / ratio;
}

EncodedImage render(const Frame& frame, const RenderSettings& settings, WallTime time) {
  Frame scaled = scale(frame, settings);
  if (settings.show_time) scaled = overlay_timestamp(scaled, time, settings.font_size);
  return encode(scaled, settings.encoding);
}

}  // namespace gvss
