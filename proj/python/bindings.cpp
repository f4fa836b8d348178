#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gvss/codec.hpp"
#include "gvss/error.hpp"
#include "gvss/frame.hpp"
#include "gvss/notify.hpp"
#include "gvss/pipeline.hpp"
#include "gvss/sensor.hpp"

namespace py = pybind11;

namespace {

gvss::WallTime from_ms(std::int64_t ms) { return gvss::from_epoch_millis(ms); }

py::bytes to_bytes(std::span<const std::uint8_t> b) {
  return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
}

std::vector<std::uint8_t> from_bytes(const py::bytes& b) {
  const std::string s = b;
  return {s.begin(), s.end()};
}

}  // namespace

PYBIND11_MODULE(_gvss, m) {
  m.doc() = "Frame pipeline, debounce rule and message formatting from the gvss core";

  py::register_exception<gvss::Error>(m, "GvssError", PyExc_ValueError);

  py::class_<gvss::Frame>(m, "Frame")
      .def(py::init([](int w, int h, const py::bytes& px) {
             return gvss::Frame(w, h, from_bytes(px));
           }),
           py::arg("width"), py::arg("height"), py::arg("pixels"))
      .def_property_readonly("width", &gvss::Frame::width)
      .def_property_readonly("height", &gvss::Frame::height)
      .def_property_readonly("sequence", &gvss::Frame::sequence)
      .def_property_readonly("pixels", [](const gvss::Frame& f) { return to_bytes(f.pixels()); })
      .def("at", [](const gvss::Frame& f, int x, int y) {
        if (x < 0 || y < 0 || x >= f.width() || y >= f.height()) {
          throw py::index_error("pixel out of range");
        }
        const auto c = f.at(x, y);
        return py::make_tuple(c.r, c.g, c.b);
      });

  m.def("synthetic_frame", &gvss::synthetic_frame, py::arg("width"), py::arg("height"),
        py::arg("sequence") = 0);

  py::enum_<gvss::Encoding>(m, "Encoding")
      .value("JPEG", gvss::Encoding::Jpeg)
      .value("PNG24", gvss::Encoding::Png24)
      .value("PNG8", gvss::Encoding::Png8)
      .value("PNG_GRAY", gvss::Encoding::PngGray);

  py::enum_<gvss::FontSize>(m, "FontSize")
      .value("SMALL", gvss::FontSize::Small)
      .value("MEDIUM", gvss::FontSize::Medium)
      .value("LARGE", gvss::FontSize::Large);

  py::class_<gvss::RenderSettings>(m, "RenderSettings")
      .def(py::init([](int w, int h, bool constrain, gvss::Encoding enc, bool show_time,
                       gvss::FontSize font) {
             gvss::RenderSettings s{w, h, constrain, enc, show_time, font};
             s.validate();
             return s;
           }),
           py::arg("width") = 320, py::arg("height") = 240, py::arg("constrain") = true,
           py::arg("encoding") = gvss::Encoding::Jpeg, py::arg("show_time") = true,
           py::arg("font_size") = gvss::FontSize::Medium)
      .def_readonly("target_width", &gvss::RenderSettings::target_width)
      .def_readonly("target_height", &gvss::RenderSettings::target_height)
      .def_readonly("constrain", &gvss::RenderSettings::constrain)
      .def_readonly("encoding", &gvss::RenderSettings::encoding)
      .def_readonly("show_time", &gvss::RenderSettings::show_time)
      .def_readonly("font_size", &gvss::RenderSettings::font_size);

  py::class_<gvss::EncodedImage>(m, "EncodedImage")
      .def_property_readonly("data", [](const gvss::EncodedImage& e) { return to_bytes(e.bytes); })
      .def_readonly("media_type", &gvss::EncodedImage::media_type)
      .def_readonly("width", &gvss::EncodedImage::width)
      .def_readonly("height", &gvss::EncodedImage::height);

  m.def("scaled_size", [](int sw, int sh, int tw, int th, bool constrain) {
    const auto s = gvss::scaled_size(sw, sh, tw, th, constrain);
    return py::make_tuple(s.width, s.height);
  });
  m.def("scale", &gvss::scale, py::arg("frame"), py::arg("settings"));
  m.def("overlay_timestamp",
        [](const gvss::Frame& f, std::int64_t epoch_ms, gvss::FontSize font) {
          return gvss::overlay_timestamp(f, from_ms(epoch_ms), font);
        },
        py::arg("frame"), py::arg("epoch_ms"), py::arg("font_size") = gvss::FontSize::Medium);
  m.def("encode", &gvss::encode, py::arg("frame"), py::arg("encoding"));
  m.def("render",
        [](const gvss::Frame& f, const gvss::RenderSettings& s, std::int64_t epoch_ms) {
          return gvss::render(f, s, from_ms(epoch_ms));
        },
        py::arg("frame"), py::arg("settings"), py::arg("epoch_ms"));
  m.def("approximate_image_size", &gvss::approximate_image_size, py::arg("settings"));
  m.def("luma", [](int r, int g, int b) {
    for (int v : {r, g, b}) {
      if (v < 0 || v > 255) throw py::value_error("channel values must be 0..255");
    }
    return gvss::luma({static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                       static_cast<std::uint8_t>(b)});
  });
  m.def("decode_png", [](const py::bytes& b) { return gvss::codec::decode_png(from_bytes(b)); });

  m.def("debounce",
        [](const std::vector<std::string>& tokens, int debounce_count) {
          std::vector<gvss::BeamStatus> readings;
          for (const auto& t : tokens) {
            const auto s = gvss::parse_beam_token(t);
            if (!s) throw py::value_error("readings must be CLEAR or OBSTRUCTED");
            readings.push_back(*s);
          }
          std::vector<std::pair<std::size_t, std::string>> out;
          for (const auto& [i, s] : gvss::debounce_sequence(readings, debounce_count)) {
            out.emplace_back(i, gvss::to_string(s));
          }
          return out;
        },
        py::arg("readings"), py::arg("debounce_count") = 2);

  m.def("format_breach_message",
        [](std::uint64_t episode, const std::string& cam, std::int64_t epoch_ms) {
          return gvss::format_breach_message(episode, cam, from_ms(epoch_ms)).body();
        },
        py::arg("episode_id"), py::arg("camera_id"), py::arg("epoch_ms"));
}
