#include "panostitch/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "panostitch/error.hpp"

namespace panostitch {

double Rng::uniform_open0() {
  // 53 random mantissa bits mapped to {1, ..., 2^53} / 2^53.
  return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw ConfigError("Rng::below: bound must be positive");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

double Rng::normal() {
  if (spare_) {
    const double v = *spare_;
    spare_.reset();
    return v;
  }
  const double u1 = uniform_open0();
  const double u2 = uniform_open0();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b,
                          std::uint64_t c) noexcept {
  return mix64(mix64(mix64(mix64(base) ^ a) ^ b) ^ c);
}

Canvas gaussian_fill(std::size_t height, std::size_t width, std::size_t channels, Rng& rng) {
  if (height == 0 || width == 0 || channels == 0) {
    std::ostringstream msg;
    msg << "gaussian_fill: dimensions must be positive, got " << height << "x" << width
        << "x" << channels;
    throw DimensionError(msg.str());
  }
  std::vector<float> data(height * width * channels);
  for (float& v : data) v = static_cast<float>(rng.normal());
  return Canvas(height, width, channels, std::move(data));
}

}  // namespace panostitch
