#include "panostitch/canvas.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "panostitch/error.hpp"

namespace panostitch {
namespace {

void check_dims(std::size_t h, std::size_t w, std::size_t c) {
  if (h == 0 || w == 0 || c == 0) {
    std::ostringstream msg;
    msg << "canvas dimensions must be positive, got " << h << "x" << w << "x" << c;
    throw DimensionError(msg.str());
  }
}

void check_same_shape(const Canvas& a, const Canvas& b, const char* op) {
  if (!a.same_shape(b)) {
    std::ostringstream msg;
    msg << op << ": shape mismatch " << a.height() << "x" << a.width() << "x"
        << a.channels() << " vs " << b.height() << "x" << b.width() << "x"
        << b.channels();
    throw ShapeError(msg.str());
  }
}

}  // namespace

Canvas::Canvas(std::size_t height, std::size_t width, std::size_t channels)
    : Canvas(height, width, channels, 0.0f) {}

Canvas::Canvas(std::size_t height, std::size_t width, std::size_t channels, float fill)
    : height_(height), width_(width), channels_(channels) {
  check_dims(height, width, channels);
  if (!std::isfinite(fill)) throw NumericalDomainError("canvas fill value is not finite");
  data_.assign(height * width * channels, fill);
}

Canvas::Canvas(std::size_t height, std::size_t width, std::size_t channels,
               std::vector<float> data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
  check_dims(height, width, channels);
  if (data_.size() != height * width * channels) {
    std::ostringstream msg;
    msg << "canvas data length " << data_.size() << " does not match "
        << height << "x" << width << "x" << channels;
    throw ShapeError(msg.str());
  }
  if (!all_finite()) throw NumericalDomainError("canvas data contains NaN or Inf");
}

bool Canvas::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](float v) { return std::isfinite(v); });
}

Canvas Canvas::columns(std::size_t begin, std::size_t count) const {
  if (count == 0 || begin + count > width_) {
    std::ostringstream msg;
    msg << "column range [" << begin << ", " << begin + count
        << ") outside canvas width " << width_;
    throw BoundsError(msg.str());
  }
  Canvas out(height_, count, channels_);
  const std::size_t row_span = count * channels_;
  for (std::size_t y = 0; y < height_; ++y) {
    const float* src = data_.data() + index(y, begin, 0);
    std::copy(src, src + row_span, out.data_.data() + out.index(y, 0, 0));
  }
  return out;
}

Canvas constant_like(const Canvas& shape, float value) {
  return Canvas(shape.height(), shape.width(), shape.channels(), value);
}

Canvas add(const Canvas& a, const Canvas& b) {
  check_same_shape(a, b, "add");
  Canvas out = a;
  auto dst = out.data();
  auto rhs = b.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += rhs[i];
  if (!out.all_finite()) throw NumericalDomainError("add: result overflowed");
  return out;
}

Canvas scale(const Canvas& a, float factor) {
  if (!std::isfinite(factor)) throw NumericalDomainError("scale: factor is not finite");
  Canvas out = a;
  for (float& v : out.data()) v *= factor;
  if (!out.all_finite()) throw NumericalDomainError("scale: result overflowed");
  return out;
}

Canvas divide(const Canvas& numerator, const Canvas& denominator) {
  check_same_shape(numerator, denominator, "divide");
  Canvas out = numerator;
  auto dst = out.data();
  auto den = denominator.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    if (den[i] == 0.0f) throw NumericalDomainError("divide: zero divisor");
    dst[i] /= den[i];
  }
  if (!out.all_finite()) throw NumericalDomainError("divide: non-finite quotient");
  return out;
}

double max_abs_diff(const Canvas& a, const Canvas& b) {
  check_same_shape(a, b, "max_abs_diff");
  double worst = 0.0;
  auto lhs = a.data();
  auto rhs = b.data();
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    worst = std::max(worst, std::abs(static_cast<double>(lhs[i]) - rhs[i]));
  }
  return worst;
}

}  // namespace panostitch
