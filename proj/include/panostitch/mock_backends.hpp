#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "panostitch/denoiser.hpp"

namespace panostitch {

// Signal/noise coefficients per step, indexed by t in [1, T]. Only mocks see
// these; the engine is schedule-free.
class MockSchedule {
 public:
  // alpha[i], sigma[i] belong to t = i + 1. Requires alpha in (0, 1],
  // sigma >= 0, alpha non-increasing in t.
  MockSchedule(std::vector<double> alpha, std::vector<double> sigma);

  // alpha_t = 1 - (1 - alpha_min) * t / T, sigma_t = sqrt(1 - alpha_t^2).
  static MockSchedule linear(int steps, double alpha_min = 0.1);

  int steps() const noexcept { return static_cast<int>(alpha_.size()); }
  double alpha(int t) const;
  double sigma(int t) const;
  // sigma_t / (sigma_t + alpha_t)
  double blend(int t) const;

 private:
  std::size_t slot(int t) const;

  std::vector<double> alpha_;
  std::vector<double> sigma_;
};

std::shared_ptr<const DenoiserHandle> mock_identity();
std::shared_ptr<const DenoiserHandle> mock_constant(float value);

// (1 - lambda_t) * patch + lambda_t * horizontal box blur of width 2r+1 with
// reflect padding inside the patch. ConfigError at call time when
// radius >= patch width.
std::shared_ptr<const DenoiserHandle> mock_blur(std::size_t radius, MockSchedule schedule);

// alpha_t * patch + sigma_t * N(0, 1) noise drawn from the request seed.
std::shared_ptr<const DenoiserHandle> mock_seeded_noise(MockSchedule schedule);

// Horizontal box blur used by mock_blur, exposed for tests.
Canvas box_blur_rows(const Canvas& patch, std::size_t radius);

}  // namespace panostitch
