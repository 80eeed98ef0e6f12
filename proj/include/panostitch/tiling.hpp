#pragma once

// Geometry of tiled sampling: full-height windows sliding horizontally over an
// extended canvas, the wraparound stitch block built from the two canvas
// ends, per-cell coverage weights and the final crop.

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "panostitch/canvas.hpp"

namespace panostitch {

struct TilingPlan {
  std::size_t canvas_width = 0;
  std::size_t window_width = 0;
  std::size_t stride = 0;
  std::vector<std::size_t> starts;  // 0, stride, ..., canvas_width - window_width

  std::size_t count() const noexcept { return starts.size(); }
};

// n = (canvas_width - window_width) / stride + 1. Throws ConfigError when the
// stride does not divide the slack exactly; there is no clamped last window.
TilingPlan plan_windows(std::size_t canvas_width, std::size_t window_width, std::size_t stride);

// Which end of the canvas comes first inside the stitch block.
enum class ConcatOrder {
  kRightmostFirst,  // [W'-W/2, W') ++ [0, W/2); wrap junction at block center
  kLeftmostFirst,   // [0, W/2) ++ [W'-W/2, W')
};

// Where the stitch passes enter the step.
enum class StitchTiming {
  kPre,   // accumulated together with the windows (default)
  kPost,  // applied after the window average; ablation-only
};

struct StitchPlan {
  std::size_t half = 0;    // W/2
  std::size_t passes = 2;  // K
  ConcatOrder concat_order = ConcatOrder::kRightmostFirst;
  StitchTiming timing = StitchTiming::kPre;

  std::size_t block_width() const noexcept { return 2 * half; }
};

// window_width must be even. passes may be 0 (degenerates to plain windows).
StitchPlan make_stitch_plan(std::size_t window_width, std::size_t passes,
                            ConcatOrder order = ConcatOrder::kRightmostFirst,
                            StitchTiming timing = StitchTiming::kPre);

struct WindowRegion {
  std::size_t start = 0;
  std::size_t width = 0;
};

struct StitchRegion {
  std::size_t half = 0;
  ConcatOrder concat_order = ConcatOrder::kRightmostFirst;
};

using Region = std::variant<WindowRegion, StitchRegion>;

// Per-cell accumulated weights; same shape as the canvas it normalizes.
using WeightMap = Canvas;

// Value and weight sums for one blending step, kept in double precision so
// the per-cell mean is rounded to float32 once. Owned by a single writer.
class Accumulator {
 public:
  Accumulator(std::size_t height, std::size_t width, std::size_t channels);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t channels() const noexcept { return channels_; }
  std::size_t index(std::size_t y, std::size_t x, std::size_t c) const noexcept {
    return (y * width_ + x) * channels_ + c;
  }

  std::span<double> value() noexcept { return value_; }
  std::span<const double> value() const noexcept { return value_; }
  std::span<double> weight() noexcept { return weight_; }
  std::span<const double> weight() const noexcept { return weight_; }

  WeightMap weight_map() const;
  // value / weight per cell. Throws NumericalDomainError if a cell has no
  // weight (the plan did not cover the canvas).
  Canvas normalized() const;

 private:
  std::size_t height_;
  std::size_t width_;
  std::size_t channels_;
  std::vector<double> value_;
  std::vector<double> weight_;
};

Canvas extract_window(const Canvas& canvas, std::size_t start, std::size_t width);
Canvas extract_stitch_block(const Canvas& canvas, const StitchPlan& plan);
Canvas extract_region(const Canvas& canvas, const Region& region);

// value += weight * patch and weight_acc += weight over the cells the region
// maps to. For a stitch region the two block halves land on the opposite
// canvas ends, undoing extract_stitch_block.
void scatter_accumulate(Accumulator& acc, const Region& region, const Canvas& patch,
                        float weight = 1.0f);

// Window coverage count per cell plus stitch.passes on stitch-covered cells.
std::vector<float> column_coverage(const TilingPlan& tiling, const StitchPlan* stitch);
WeightMap coverage_map(std::size_t height, std::size_t channels, const TilingPlan& tiling,
                       const StitchPlan* stitch);

// Columns [W/2, W' - W/2).
Canvas global_crop(const Canvas& canvas, std::size_t window_width);

}  // namespace panostitch
