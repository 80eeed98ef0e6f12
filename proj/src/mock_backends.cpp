#include "panostitch/mock_backends.hpp"

#include <cmath>
#include <sstream>

#include "panostitch/error.hpp"
#include "panostitch/rng.hpp"

namespace panostitch {

MockSchedule::MockSchedule(std::vector<double> alpha, std::vector<double> sigma)
    : alpha_(std::move(alpha)), sigma_(std::move(sigma)) {
  if (alpha_.empty() || alpha_.size() != sigma_.size()) {
    throw ConfigError("schedule needs matching, non-empty alpha and sigma");
  }
  for (std::size_t i = 0; i < alpha_.size(); ++i) {
    if (!(alpha_[i] > 0.0 && alpha_[i] <= 1.0)) {
      throw ConfigError("schedule alpha must lie in (0, 1]");
    }
    if (!(sigma_[i] >= 0.0) || !std::isfinite(sigma_[i])) {
      throw ConfigError("schedule sigma must be finite and non-negative");
    }
    if (i > 0 && alpha_[i] > alpha_[i - 1]) {
      throw ConfigError("schedule alpha must not increase with t");
    }
  }
}

MockSchedule MockSchedule::linear(int steps, double alpha_min) {
  if (steps < 1) throw ConfigError("schedule needs at least one step");
  if (!(alpha_min > 0.0 && alpha_min <= 1.0)) throw ConfigError("alpha_min must be in (0, 1]");
  std::vector<double> alpha(steps);
  std::vector<double> sigma(steps);
  for (int t = 1; t <= steps; ++t) {
    const double a = 1.0 - (1.0 - alpha_min) * t / steps;
    alpha[t - 1] = a;
    sigma[t - 1] = std::sqrt(std::max(0.0, 1.0 - a * a));
  }
  return MockSchedule(std::move(alpha), std::move(sigma));
}

std::size_t MockSchedule::slot(int t) const {
  if (t < 1 || t > steps()) {
    std::ostringstream msg;
    msg << "step " << t << " outside schedule [1, " << steps() << "]";
    throw ConfigError(msg.str());
  }
  return static_cast<std::size_t>(t - 1);
}

double MockSchedule::alpha(int t) const { return alpha_[slot(t)]; }
double MockSchedule::sigma(int t) const { return sigma_[slot(t)]; }

double MockSchedule::blend(int t) const {
  const std::size_t i = slot(t);
  return sigma_[i] / (sigma_[i] + alpha_[i]);
}

Canvas box_blur_rows(const Canvas& patch, std::size_t radius) {
  const std::size_t width = patch.width();
  if (radius >= width) {
    std::ostringstream msg;
    msg << "blur radius " << radius << " must be smaller than patch width " << width;
    throw ConfigError(msg.str());
  }
  auto reflect = [width](std::ptrdiff_t x) -> std::size_t {
    const auto w = static_cast<std::ptrdiff_t>(width);
    if (x < 0) return static_cast<std::size_t>(-x);
    if (x >= w) return static_cast<std::size_t>(2 * (w - 1) - x);
    return static_cast<std::size_t>(x);
  };
  Canvas out(patch.height(), width, patch.channels());
  const double norm = 1.0 / static_cast<double>(2 * radius + 1);
  const auto r = static_cast<std::ptrdiff_t>(radius);
  for (std::size_t y = 0; y < patch.height(); ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      for (std::size_t c = 0; c < patch.channels(); ++c) {
        double sum = 0.0;
        for (std::ptrdiff_t k = -r; k <= r; ++k) {
          sum += patch.at(y, reflect(static_cast<std::ptrdiff_t>(x) + k), c);
        }
        out.at(y, x, c) = static_cast<float>(sum * norm);
      }
    }
  }
  return out;
}

namespace {

class IdentityDenoiser final : public DenoiserHandle {
 public:
  Canvas denoise(const DenoiseRequest& request) const override { return request.patch; }
  std::string id() const override { return "mock:identity"; }
};

class ConstantDenoiser final : public DenoiserHandle {
 public:
  explicit ConstantDenoiser(float value) : value_(value) {}
  Canvas denoise(const DenoiseRequest& request) const override {
    return constant_like(request.patch, value_);
  }
  std::string id() const override {
    std::ostringstream out;
    out << "mock:constant:" << value_;
    return out.str();
  }

 private:
  float value_;
};

class BlurDenoiser final : public DenoiserHandle {
 public:
  BlurDenoiser(std::size_t radius, MockSchedule schedule)
      : radius_(radius), schedule_(std::move(schedule)) {
    if (radius_ < 1) throw ConfigError("blur radius must be at least 1");
  }

  Canvas denoise(const DenoiseRequest& request) const override {
    const double lambda = schedule_.blend(request.t);
    const Canvas blurred = box_blur_rows(request.patch, radius_);
    Canvas out = request.patch;
    auto dst = out.data();
    auto blur = blurred.data();
    for (std::size_t i = 0; i < dst.size(); ++i) {
      dst[i] = static_cast<float>((1.0 - lambda) * dst[i] + lambda * blur[i]);
    }
    return out;
  }
  std::string id() const override { return "mock:blur:" + std::to_string(radius_); }

 private:
  std::size_t radius_;
  MockSchedule schedule_;
};

class SeededNoiseDenoiser final : public DenoiserHandle {
 public:
  explicit SeededNoiseDenoiser(MockSchedule schedule) : schedule_(std::move(schedule)) {}

  Canvas denoise(const DenoiseRequest& request) const override {
    const double alpha = schedule_.alpha(request.t);
    const double sigma = schedule_.sigma(request.t);
    const Canvas& patch = request.patch;
    Rng rng(request.seed);
    const Canvas noise = gaussian_fill(patch.height(), patch.width(), patch.channels(), rng);
    Canvas out = patch;
    auto dst = out.data();
    auto eps = noise.data();
    for (std::size_t i = 0; i < dst.size(); ++i) {
      dst[i] = static_cast<float>(alpha * dst[i] + sigma * eps[i]);
    }
    return out;
  }
  std::string id() const override { return "mock:noise"; }

 private:
  MockSchedule schedule_;
};

}  // namespace

std::shared_ptr<const DenoiserHandle> mock_identity() {
  return std::make_shared<IdentityDenoiser>();
}

std::shared_ptr<const DenoiserHandle> mock_constant(float value) {
  return std::make_shared<ConstantDenoiser>(value);
}

std::shared_ptr<const DenoiserHandle> mock_blur(std::size_t radius, MockSchedule schedule) {
  return std::make_shared<BlurDenoiser>(radius, std::move(schedule));
}

std::shared_ptr<const DenoiserHandle> mock_seeded_noise(MockSchedule schedule) {
  return std::make_shared<SeededNoiseDenoiser>(std::move(schedule));
}

}  // namespace panostitch
