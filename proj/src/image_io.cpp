#include "panostitch/image_io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <memory>
#include <vector>

#include "panostitch/error.hpp"

namespace panostitch {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void check_range(ValueRange range) {
  if (!(range.hi > range.lo) || !std::isfinite(range.lo) || !std::isfinite(range.hi)) {
    throw ConfigError("image value range must satisfy lo < hi");
  }
}

std::uint8_t quantize(float v, ValueRange range) {
  const double scaled =
      (static_cast<double>(v) - range.lo) / (static_cast<double>(range.hi) - range.lo) * 255.0;
  const double rounded = std::floor(scaled + 0.5);
  if (rounded <= 0.0) return 0;
  if (rounded >= 255.0) return 255;
  return static_cast<std::uint8_t>(rounded);
}

}  // namespace

void export_image(const Canvas& canvas, const std::filesystem::path& path, ValueRange range) {
  check_range(range);
  if (canvas.channels() != 1 && canvas.channels() != 3) {
    throw ConfigError("export_image: unsupported channels " +
                      std::to_string(canvas.channels()) + " (need 1 or 3)");
  }

  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw IoError("cannot open " + path.string() + " for writing");

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng initialization failed");
  }

  std::vector<std::uint8_t> pixels(canvas.size());
  auto src = canvas.data();
  for (std::size_t i = 0; i < pixels.size(); ++i) pixels[i] = quantize(src[i], range);
  std::vector<png_bytep> rows(canvas.height());
  for (std::size_t y = 0; y < canvas.height(); ++y) {
    rows[y] = pixels.data() + y * canvas.width() * canvas.channels();
  }

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng failed writing " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(canvas.width()),
               static_cast<png_uint_32>(canvas.height()), 8,
               canvas.channels() == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

Canvas import_image(const std::filesystem::path& path, ValueRange range) {
  check_range(range);
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw IoError("cannot open " + path.string());

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("libpng initialization failed");
  }

  std::vector<std::uint8_t> pixels;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("libpng failed reading " + path.string());
  }
  png_init_io(png, file.get());
  png_read_info(png, info);
  const auto width = png_get_image_width(png, info);
  const auto height = png_get_image_height(png, info);
  const auto color = png_get_color_type(png, info);
  const auto depth = png_get_bit_depth(png, info);
  if (depth != 8 || (color != PNG_COLOR_TYPE_GRAY && color != PNG_COLOR_TYPE_RGB)) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("import_image: only 8-bit gray or RGB PNGs are supported");
  }
  const std::size_t channels = color == PNG_COLOR_TYPE_GRAY ? 1 : 3;
  pixels.resize(static_cast<std::size_t>(width) * height * channels);
  rows.resize(height);
  for (std::size_t y = 0; y < height; ++y) rows[y] = pixels.data() + y * width * channels;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  std::vector<float> values(pixels.size());
  const double span = static_cast<double>(range.hi) - range.lo;
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = static_cast<float>(range.lo + pixels[i] / 255.0 * span);
  }
  return Canvas(height, width, channels, std::move(values));
}

}  // namespace panostitch
