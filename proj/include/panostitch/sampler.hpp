#pragma once

// Tiled denoising loops. One step fuses the denoised windows (and, for
// stitch mode, the denoised wraparound block) into the per-cell weighted mean
// that minimizes the summed squared deviation from every denoised crop.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "panostitch/canvas.hpp"
#include "panostitch/denoiser.hpp"
#include "panostitch/rng.hpp"
#include "panostitch/tiling.hpp"

namespace panostitch {

enum class SamplingMode { kMultiDiffusion, kStitchDiffusion };

std::string to_string(SamplingMode mode);
std::string to_string(ConcatOrder order);
std::string to_string(StitchTiming timing);
// ConfigError on unknown names. Accepts "multi"/"multidiffusion",
// "stitch"/"stitchdiffusion", "pre"/"post", "rightmost-first"/"leftmost-first".
SamplingMode parse_mode(const std::string& name);
StitchTiming parse_timing(const std::string& name);
ConcatOrder parse_concat_order(const std::string& name);

struct SamplerConfig {
  std::size_t height = 64;         // H
  std::size_t window_width = 128;  // W
  std::size_t canvas_width = 256;  // W'
  std::size_t stride = 16;
  std::size_t channels = 4;
  int steps = 50;
  std::uint64_t seed = 0;
  SamplingMode mode = SamplingMode::kStitchDiffusion;
  std::size_t stitch_passes = 2;
  ConcatOrder concat_order = ConcatOrder::kRightmostFirst;
  StitchTiming stitch_timing = StitchTiming::kPre;
  bool periodic_init = true;
  bool enforce_periodicity = false;
  std::size_t max_inflight = 1;

  // Columns c and c + period() describe the same longitude.
  std::size_t period() const noexcept { return 2 * height; }

  // Throws ConfigError. Stitch mode requires W' = 2H + W and K >= 1.
  void validate() const;
  TilingPlan tiling() const;
  StitchPlan stitch() const;
};

// Per-request seeds. Windows and stitch passes draw from separate streams so
// that two passes over the same block get different noise.
std::uint64_t window_seed(std::uint64_t run_seed, int t, std::size_t window);
std::uint64_t stitch_pass_seed(std::uint64_t run_seed, int t, std::size_t pass);

struct StepOptions {
  std::uint64_t seed = 0;
  int total_steps = 1;
  std::size_t max_inflight = 1;
};

// Gaussian noise H x W' x C from Rng(config.seed). With periodic_init every
// column c >= 2H repeats column c mod 2H.
Canvas init_canvas(const SamplerConfig& config);

// Value/weight sums for one step with the stitch passes accumulated first
// (pass 1..K, then window 1..n); stitch may be null. The weight half equals
// coverage_map for the same plans.
Accumulator accumulate_step(const Canvas& jt, int t, const TilingPlan& tiling,
                            const StitchPlan* stitch, const DenoiserHandle& denoiser,
                            const Conditioning& conditioning, const StepOptions& options);

Canvas multidiffusion_step(const Canvas& jt, int t, const TilingPlan& tiling,
                           const DenoiserHandle& denoiser, const Conditioning& conditioning,
                           const StepOptions& options);

// kPre: one weighted mean over K stitch passes plus all windows.
// kPost: window mean first, then the stitch-covered columns are overwritten
// with the mean of K stitch-block denoisings of that result.
Canvas stitchdiffusion_step(const Canvas& jt, int t, const TilingPlan& tiling,
                            const StitchPlan& stitch, const DenoiserHandle& denoiser,
                            const Conditioning& conditioning, const StepOptions& options);

// Replaces every column by the mean of all columns congruent to it mod period.
void enforce_periodic(Canvas& canvas, std::size_t period);

struct RunResult {
  Canvas j0;
  Canvas jsyn;
  std::vector<double> step_seconds;  // index 0 is step T
};

using StepObserver = std::function<void(int t, const Canvas& current)>;

// Steps T..1 from init_canvas, then Jsyn = global_crop(J0, W). A denoiser
// failure aborts the run with BackendError carrying step and window.
RunResult run(const SamplerConfig& config, const DenoiserHandle& denoiser,
              const Conditioning& conditioning, const StepObserver& observer = {});

}  // namespace panostitch
