#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gvss/clock.hpp"

namespace gvss {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb&) const = default;
};

// Uncompressed 8-bit RGB raster, row-major, three bytes per pixel.
class Frame {
 public:
  // Throws Error(InvalidSettings) unless width, height >= 1 and
  // pixels.size() == width * height * 3.
  Frame(int width, int height, std::vector<std::uint8_t> pixels,
        WallTime captured_at = {}, std::uint64_t sequence = 0);

  int width() const { return width_; }
  int height() const { return height_; }
  std::span<const std::uint8_t> pixels() const { return pixels_; }
  std::span<std::uint8_t> mutable_pixels() { return pixels_; }
  WallTime captured_at() const { return captured_at_; }
  std::uint64_t sequence() const { return sequence_; }

  void set_captured_at(WallTime t) { captured_at_ = t; }
  void set_sequence(std::uint64_t s) { sequence_ = s; }

  Rgb at(int x, int y) const {
    const auto i = offset(x, y);
    return {pixels_[i], pixels_[i + 1], pixels_[i + 2]};
  }
  void set(int x, int y, Rgb c) {
    const auto i = offset(x, y);
    pixels_[i] = c.r;
    pixels_[i + 1] = c.g;
    pixels_[i + 2] = c.b;
  }

  // Pixel data and dimensions only; metadata is not compared.
  bool same_pixels(const Frame& other) const {
    return width_ == other.width_ && height_ == other.height_ && pixels_ == other.pixels_;
  }

 private:
  std::size_t offset(int x, int y) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) * 3;
  }

  int width_;
  int height_;
  std::vector<std::uint8_t> pixels_;
  WallTime captured_at_;
  std::uint64_t sequence_;
};

// pixel(x, y) = ((x + sequence) mod 256, (y + sequence) mod 256, (x ^ y) mod 256)
Frame synthetic_frame(int width, int height, std::uint64_t sequence);

}  // namespace gvss
