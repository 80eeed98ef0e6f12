#include "panostitch/tiling.hpp"

#include <algorithm>
#include <sstream>

#include "panostitch/error.hpp"

namespace panostitch {
namespace {

// Column ranges (canvas_begin, block_begin) of the two halves of a stitch
// block, in block order.
struct StitchSpans {
  std::size_t first_canvas_begin;
  std::size_t second_canvas_begin;
};

StitchSpans stitch_spans(std::size_t canvas_width, const StitchRegion& region) {
  const std::size_t right_begin = canvas_width - region.half;
  if (region.concat_order == ConcatOrder::kRightmostFirst) return {right_begin, 0};
  return {0, right_begin};
}

void check_stitch_fits(std::size_t canvas_width, std::size_t half) {
  if (half == 0 || 2 * half > canvas_width) {
    std::ostringstream msg;
    msg << "stitch half-width " << half << " does not fit canvas width " << canvas_width;
    throw ConfigError(msg.str());
  }
}

void copy_columns(const Canvas& src, std::size_t src_col, Canvas& dst, std::size_t dst_col,
                  std::size_t count) {
  const std::size_t span = count * src.channels();
  for (std::size_t y = 0; y < src.height(); ++y) {
    const float* from = src.data().data() + src.index(y, src_col, 0);
    std::copy(from, from + span, dst.data().data() + dst.index(y, dst_col, 0));
  }
}

void accumulate_columns(Accumulator& acc, std::size_t canvas_col, const Canvas& patch,
                        std::size_t patch_col, std::size_t count, float weight) {
  const std::size_t span = count * patch.channels();
  auto value = acc.value();
  auto wsum = acc.weight();
  auto src = patch.data();
  const double w = weight;
  for (std::size_t y = 0; y < patch.height(); ++y) {
    const std::size_t dst0 = acc.index(y, canvas_col, 0);
    const std::size_t src0 = patch.index(y, patch_col, 0);
    for (std::size_t k = 0; k < span; ++k) {
      value[dst0 + k] += w * src[src0 + k];
      wsum[dst0 + k] += w;
    }
  }
}

}  // namespace

TilingPlan plan_windows(std::size_t canvas_width, std::size_t window_width, std::size_t stride) {
  if (window_width == 0 || stride == 0) {
    throw ConfigError("window width and stride must be positive");
  }
  if (canvas_width < window_width) {
    std::ostringstream msg;
    msg << "canvas width " << canvas_width << " is smaller than window width " << window_width;
    throw ConfigError(msg.str());
  }
  const std::size_t slack = canvas_width - window_width;
  if (slack % stride != 0) {
    std::ostringstream msg;
    msg << "stride " << stride << " does not divide canvas width - window width = " << slack;
    throw ConfigError(msg.str());
  }
  TilingPlan plan{canvas_width, window_width, stride, {}};
  const std::size_t n = slack / stride + 1;
  plan.starts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) plan.starts.push_back(i * stride);
  return plan;
}

StitchPlan make_stitch_plan(std::size_t window_width, std::size_t passes, ConcatOrder order,
                            StitchTiming timing) {
  if (window_width == 0 || window_width % 2 != 0) {
    throw ConfigError("stitch block needs an even, positive window width");
  }
  return StitchPlan{window_width / 2, passes, order, timing};
}

Canvas extract_window(const Canvas& canvas, std::size_t start, std::size_t width) {
  if (width == 0 || start + width > canvas.width()) {
    std::ostringstream msg;
    msg << "window [" << start << ", " << start + width << ") outside canvas width "
        << canvas.width();
    throw BoundsError(msg.str());
  }
  return canvas.columns(start, width);
}

Canvas extract_stitch_block(const Canvas& canvas, const StitchPlan& plan) {
  return extract_region(canvas, StitchRegion{plan.half, plan.concat_order});
}

Canvas extract_region(const Canvas& canvas, const Region& region) {
  if (const auto* w = std::get_if<WindowRegion>(&region)) {
    return extract_window(canvas, w->start, w->width);
  }
  const auto& s = std::get<StitchRegion>(region);
  check_stitch_fits(canvas.width(), s.half);
  const auto spans = stitch_spans(canvas.width(), s);
  Canvas block(canvas.height(), 2 * s.half, canvas.channels());
  copy_columns(canvas, spans.first_canvas_begin, block, 0, s.half);
  copy_columns(canvas, spans.second_canvas_begin, block, s.half, s.half);
  return block;
}

Accumulator::Accumulator(std::size_t height, std::size_t width, std::size_t channels)
    : height_(height), width_(width), channels_(channels) {
  if (height == 0 || width == 0 || channels == 0) {
    throw DimensionError("accumulator dimensions must be positive");
  }
  value_.assign(height * width * channels, 0.0);
  weight_.assign(height * width * channels, 0.0);
}

WeightMap Accumulator::weight_map() const {
  std::vector<float> w(weight_.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = static_cast<float>(weight_[i]);
  return WeightMap(height_, width_, channels_, std::move(w));
}

Canvas Accumulator::normalized() const {
  std::vector<float> out(value_.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (weight_[i] == 0.0) {
      throw NumericalDomainError("accumulator cell has zero weight; plan does not cover canvas");
    }
    out[i] = static_cast<float>(value_[i] / weight_[i]);
  }
  return Canvas(height_, width_, channels_, std::move(out));
}

void scatter_accumulate(Accumulator& acc, const Region& region, const Canvas& patch,
                        float weight) {
  const std::size_t region_width = std::holds_alternative<WindowRegion>(region)
                                       ? std::get<WindowRegion>(region).width
                                       : 2 * std::get<StitchRegion>(region).half;
  if (patch.height() != acc.height() || patch.channels() != acc.channels() ||
      patch.width() != region_width) {
    std::ostringstream msg;
    msg << "scatter_accumulate: patch " << patch.height() << "x" << patch.width() << "x"
        << patch.channels() << " does not match region " << acc.height() << "x"
        << region_width << "x" << acc.channels();
    throw ShapeError(msg.str());
  }

  if (const auto* w = std::get_if<WindowRegion>(&region)) {
    if (w->start + w->width > acc.width()) {
      throw BoundsError("scatter_accumulate: window outside canvas");
    }
    accumulate_columns(acc, w->start, patch, 0, w->width, weight);
    return;
  }
  const auto& s = std::get<StitchRegion>(region);
  check_stitch_fits(acc.width(), s.half);
  const auto spans = stitch_spans(acc.width(), s);
  accumulate_columns(acc, spans.first_canvas_begin, patch, 0, s.half, weight);
  accumulate_columns(acc, spans.second_canvas_begin, patch, s.half, s.half, weight);
}

std::vector<float> column_coverage(const TilingPlan& tiling, const StitchPlan* stitch) {
  std::vector<float> cover(tiling.canvas_width, 0.0f);
  for (auto start : tiling.starts) {
    for (std::size_t x = start; x < start + tiling.window_width; ++x) cover[x] += 1.0f;
  }
  if (stitch != nullptr && stitch->passes > 0) {
    check_stitch_fits(tiling.canvas_width, stitch->half);
    const auto k = static_cast<float>(stitch->passes);
    for (std::size_t x = 0; x < stitch->half; ++x) {
      cover[x] += k;
      cover[tiling.canvas_width - 1 - x] += k;
    }
  }
  return cover;
}

WeightMap coverage_map(std::size_t height, std::size_t channels, const TilingPlan& tiling,
                       const StitchPlan* stitch) {
  const auto cover = column_coverage(tiling, stitch);
  WeightMap map(height, tiling.canvas_width, channels);
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < tiling.canvas_width; ++x) {
      for (std::size_t c = 0; c < channels; ++c) map.at(y, x, c) = cover[x];
    }
  }
  return map;
}

Canvas global_crop(const Canvas& canvas, std::size_t window_width) {
  if (window_width >= canvas.width()) {
    std::ostringstream msg;
    msg << "global_crop: window width " << window_width << " leaves nothing of canvas width "
        << canvas.width();
    throw ConfigError(msg.str());
  }
  const std::size_t half = window_width / 2;
  return canvas.columns(half, canvas.width() - 2 * half);
}

}  // namespace panostitch
