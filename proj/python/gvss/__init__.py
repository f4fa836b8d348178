"""Python bindings for the gvss frame pipeline and sensor debounce rule."""

from ._gvss import (
    EncodedImage,
    Encoding,
    FontSize,
    Frame,
    GvssError,
    RenderSettings,
    approximate_image_size,
    debounce,
    decode_png,
    encode,
    format_breach_message,
    luma,
    overlay_timestamp,
    render,
    scale,
    scaled_size,
    synthetic_frame,
)

__all__ = [
    "EncodedImage",
    "Encoding",
    "FontSize",
    "Frame",
    "GvssError",
    "RenderSettings",
    "approximate_image_size",
    "debounce",
    "decode_png",
    "encode",
    "format_breach_message",
    "luma",
    "overlay_timestamp",
    "render",
    "scale",
    "scaled_size",
    "synthetic_frame",
]
