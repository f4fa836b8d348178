#include "gvss/codec.hpp"

#include <cctype>
#include <csetjmp>
#include <cstdlib>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include <jpeglib.h>
#include <png.h>

#include "gvss/error.hpp"

namespace gvss::codec {

namespace {

Bytes write_png(png_image& image, const void* buffer, const void* colormap) {
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, buffer, 0, colormap)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::InvalidSettings, "png encode failed: " + msg);
  }
  Bytes out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, buffer, 0, colormap)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::InvalidSettings, "png encode failed: " + msg);
  }
  out.resize(size);
  return out;
}

png_image blank_image(int width, int height, png_uint_32 format) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = format;
  return image;
}

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

}  // namespace

Bytes encode_png_rgb(const Frame& frame) {
  png_image image = blank_image(frame.width(), frame.height(), PNG_FORMAT_RGB);
  return write_png(image, frame.pixels().data(), nullptr);
}

Bytes encode_png_gray(int width, int height, std::span<const std::uint8_t> samples) {
  png_image image = blank_image(width, height, PNG_FORMAT_GRAY);
  return write_png(image, samples.data(), nullptr);
}

Bytes encode_png_indexed(int width, int height, std::span<const std::uint8_t> indices,
                         std::span<const Rgb> palette) {
  if (palette.empty() || palette.size() > 256) {
    throw Error(ErrorCode::InvalidSettings, "palette must have 1..256 entries");
  }
  png_image image = blank_image(width, height, PNG_FORMAT_RGB_COLORMAP);
  image.colormap_entries = static_cast<png_uint_32>(palette.size());
  std::vector<std::uint8_t> colormap;
  colormap.reserve(palette.size() * 3);
  for (const Rgb& c : palette) {
    colormap.push_back(c.r);
    colormap.push_back(c.g);
    colormap.push_back(c.b);
  }
  return write_png(image, indices.data(), colormap.data());
}

Bytes encode_jpeg(const Frame& frame, int quality) {
  jpeg_compress_struct cinfo;
  JpegErrorManager err;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit;
  unsigned char* mem = nullptr;
  unsigned long mem_size = 0;

  if (setjmp(err.jump)) {
    jpeg_destroy_compress(&cinfo);
    std::free(mem);
    throw Error(ErrorCode::InvalidSettings, std::string("jpeg encode failed: ") + err.message);
  }

  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, &mem, &mem_size);
  cinfo.image_width = static_cast<JDIMENSION>(frame.width());
  cinfo.image_height = static_cast<JDIMENSION>(frame.height());
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  const auto stride = static_cast<std::size_t>(frame.width()) * 3;
  const std::uint8_t* base = frame.pixels().data();
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = const_cast<JSAMPROW>(base + cinfo.next_scanline * stride);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);

  Bytes out(mem, mem + mem_size);
  std::free(mem);
  return out;
}

Frame decode_png(std::span<const std::uint8_t> bytes) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw Error(ErrorCode::InvalidSettings, std::string("png decode failed: ") + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> px(PNG_IMAGE_SIZE(image));
  // Transparent pixels are composited onto black.
  png_color black{0, 0, 0};
  if (!png_image_finish_read(&image, &black, px.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::InvalidSettings, "png decode failed: " + msg);
  }
  return Frame(static_cast<int>(image.width), static_cast<int>(image.height), std::move(px));
}

Frame decode_ppm(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  auto next_token = [&]() -> std::string {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
    std::string tok;
    while (pos < bytes.size() && !std::isspace(bytes[pos])) tok += static_cast<char>(bytes[pos++]);
    return tok;
  };
  if (next_token() != "P6") throw Error(ErrorCode::InvalidSettings, "not a binary PPM");
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(next_token());
    h = std::stoi(next_token());
    maxval = std::stoi(next_token());
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidSettings, "malformed PPM header");
  }
  if (maxval != 255 || w < 1 || h < 1) {
    throw Error(ErrorCode::InvalidSettings, "unsupported PPM (need maxval 255)");
  }
  ++pos;  // single whitespace before raster
  const auto need = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3;
  if (pos > bytes.size() || bytes.size() - pos < need) {
    throw Error(ErrorCode::InvalidSettings, "truncated PPM raster");
  }
  return Frame(w, h, std::vector<std::uint8_t>(bytes.begin() + static_cast<long>(pos),
                                               bytes.begin() + static_cast<long>(pos + need)));
}

Frame load_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto ext = path.extension().string();
  if (ext == ".png" || ext == ".PNG") return decode_png(bytes);
  if (ext == ".ppm" || ext == ".PPM") return decode_ppm(bytes);
  throw Error(ErrorCode::InvalidSettings, "unsupported image type: " + path.string());
}

}  // namespace gvss::codec
