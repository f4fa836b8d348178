#include "gvss/frame.hpp"

#include <string>

#include "gvss/error.hpp"

namespace gvss {

Frame::Frame(int width, int height, std::vector<std::uint8_t> pixels,
             WallTime captured_at, std::uint64_t sequence)
    : width_(width),
      height_(height),
      pixels_(std::move(pixels)),
      captured_at_(captured_at),
      sequence_(sequence) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::InvalidSettings, "frame dimensions must be >= 1");
  }
  const auto expected = static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3;
  if (pixels_.size() != expected) {
    throw Error(ErrorCode::InvalidSettings,
                "pixel buffer is " + std::to_string(pixels_.size()) + " bytes, expected " +
                    std::to_string(expected));
  }
}

Frame synthetic_frame(int width, int height, std::uint64_t sequence) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::InvalidSettings, "frame dimensions must be >= 1");
  }
  std::vector<std::uint8_t> px(static_cast<std::size_t>(width) * height * 3);
  const auto seq = static_cast<std::uint32_t>(sequence % 256);
  std::size_t i = 0;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const auto ux = static_cast<std::uint32_t>(x);
      const auto uy = static_cast<std::uint32_t>(y);
      px[i++] = static_cast<std::uint8_t>((ux + seq) & 0xFF);
      px[i++] = static_cast<std::uint8_t>((uy + seq) & 0xFF);
      px[i++] = static_cast<std::uint8_t>((ux ^ uy) & 0xFF);
    }
  }
  return Frame(width, height, std::move(px), WallTime{}, sequence);
}

}  // namespace gvss
