#pragma once

#include <filesystem>

#include "panostitch/canvas.hpp"

namespace panostitch {

struct ValueRange {
  float lo = -1.0f;
  float hi = 1.0f;
};

// Maps [range.lo, range.hi] linearly onto [0, 255], rounds half up, clamps,
// and writes an 8-bit gray (1 channel) or RGB (3 channel) PNG.
void export_image(const Canvas& canvas, const std::filesystem::path& path, ValueRange range);

// Reads an 8-bit gray or RGB PNG back into a canvas, mapping [0, 255] onto
// range (the inverse of export_image up to quantization).
Canvas import_image(const std::filesystem::path& path, ValueRange range);

}  // namespace panostitch
