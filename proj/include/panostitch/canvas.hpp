#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace panostitch {

// Dense H x W x C float32 image, row-major (height, width, channels).
// Used for the extended canvas, cropped windows, stitch blocks and the
// accumulators of the blending step. Value type: copies are deep.
class Canvas {
 public:
  Canvas() = default;
  // Zero-filled. Throws DimensionError if any dimension is zero.
  Canvas(std::size_t height, std::size_t width, std::size_t channels);
  Canvas(std::size_t height, std::size_t width, std::size_t channels, float fill);
  // Takes ownership of data; size must equal height * width * channels and
  // every value must be finite.
  Canvas(std::size_t height, std::size_t width, std::size_t channels,
         std::vector<float> data);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t channels() const noexcept { return channels_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::size_t index(std::size_t y, std::size_t x, std::size_t c) const noexcept {
    return (y * width_ + x) * channels_ + c;
  }
  float& at(std::size_t y, std::size_t x, std::size_t c) noexcept {
    return data_[index(y, x, c)];
  }
  float at(std::size_t y, std::size_t x, std::size_t c) const noexcept {
    return data_[index(y, x, c)];
  }

  std::span<float> data() noexcept { return data_; }
  std::span<const float> data() const noexcept { return data_; }

  bool same_shape(const Canvas& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_ &&
           channels_ == other.channels_;
  }
  bool all_finite() const noexcept;

  // Columns [begin, begin + count), full height.
  Canvas columns(std::size_t begin, std::size_t count) const;

  friend bool operator==(const Canvas&, const Canvas&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::size_t channels_ = 0;
  std::vector<float> data_;
};

Canvas constant_like(const Canvas& shape, float value);

// Elementwise helpers. Shapes must match (ShapeError otherwise).
Canvas add(const Canvas& a, const Canvas& b);
Canvas scale(const Canvas& a, float factor);
// Throws NumericalDomainError on a zero divisor or a non-finite quotient.
Canvas divide(const Canvas& numerator, const Canvas& denominator);

// Largest |a - b| over all entries; shapes must match.
double max_abs_diff(const Canvas& a, const Canvas& b);

}  // namespace panostitch
