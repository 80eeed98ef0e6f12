#include <algorithm>

#include <gtest/gtest.h>

#include "panostitch/error.hpp"
#include "panostitch/rng.hpp"
#include "panostitch/tiling.hpp"
#include "test_support.hpp"

namespace panostitch {
namespace {

// Counts, per column, every window start s with s <= x < s + W, plus K for
// each column that any stitch pass writes. Stitch columns are enumerated from
// the block index map rather than from the half-width arithmetic.
std::vector<int> brute_force_coverage(std::size_t canvas_width, std::size_t window_width,
                                      std::size_t stride, std::size_t passes) {
  std::vector<int> cover(canvas_width, 0);
  for (std::size_t s = 0; s + window_width <= canvas_width; s += stride) {
    for (std::size_t x = 0; x < canvas_width; ++x) cover[x] += (x >= s && x < s + window_width);
  }
  if (passes > 0) {
    const Canvas ramp = test::column_ramp(1, canvas_width);
    const Canvas block = extract_stitch_block(ramp, make_stitch_plan(window_width, passes));
    for (std::size_t i = 0; i < block.width(); ++i) {
      cover[static_cast<std::size_t>(block.at(0, i, 0))] += static_cast<int>(passes);
    }
  }
  return cover;
}

TEST(PlanWindows, PixelConfiguration) {
  const TilingPlan plan = plan_windows(2048, 1024, 128);
  ASSERT_EQ(plan.count(), 9u);
  for (std::size_t i = 0; i < 9; ++i) EXPECT_EQ(plan.starts[i], 128 * i);
}

TEST(PlanWindows, SingleWindowAndSmallCase) {
  EXPECT_EQ(plan_windows(1024, 1024, 128).starts, std::vector<std::size_t>{0});
  EXPECT_EQ(plan_windows(48, 16, 8).starts, (std::vector<std::size_t>{0, 8, 16, 24, 32}));
}

TEST(PlanWindows, RejectsNonDividingStrideAndBadSizes) {
  EXPECT_THROW(plan_windows(50, 16, 8), ConfigError);
  EXPECT_THROW(plan_windows(16, 32, 8), ConfigError);
  EXPECT_THROW(plan_windows(48, 16, 0), ConfigError);
}

TEST(ExtractWindow, ReturnsKnownPatch) {
  const Canvas canvas = test::random_canvas(4, 20, 2, 1);
  const Canvas w = extract_window(canvas, 6, 8);
  for (std::size_t y = 0; y < 4; ++y)
    for (std::size_t x = 0; x < 8; ++x)
      for (std::size_t c = 0; c < 2; ++c) EXPECT_EQ(w.at(y, x, c), canvas.at(y, x + 6, c));
  EXPECT_THROW(extract_window(canvas, 13, 8), BoundsError);
}

TEST(ExtractWindow, ExtractThenScatterSingleWindowIsIdentity) {
  const Canvas canvas = test::random_canvas(5, 12, 3, 2);
  Accumulator acc(5, 12, 3);
  scatter_accumulate(acc, WindowRegion{0, 12}, extract_window(canvas, 0, 12));
  EXPECT_EQ(acc.normalized(), canvas);
}

TEST(StitchBlock, RightmostFirstColumnOrder) {
  const Canvas block =
      extract_stitch_block(test::column_ramp(2, 16), make_stitch_plan(8, 2));
  ASSERT_EQ(block.width(), 8u);
  const float expected[] = {12, 13, 14, 15, 0, 1, 2, 3};
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(block.at(1, i, 0), expected[i]);
}

TEST(StitchBlock, LeftmostFirstColumnOrder) {
  const Canvas block = extract_stitch_block(
      test::column_ramp(1, 16), make_stitch_plan(8, 2, ConcatOrder::kLeftmostFirst));
  const float expected[] = {0, 1, 2, 3, 12, 13, 14, 15};
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(block.at(0, i, 0), expected[i]);
}

TEST(StitchBlock, FullSizeHalves) {
  const Canvas block =
      extract_stitch_block(test::column_ramp(1, 2048), make_stitch_plan(1024, 2));
  ASSERT_EQ(block.width(), 1024u);
  EXPECT_EQ(block.at(0, 0, 0), 1536.0f);
  EXPECT_EQ(block.at(0, 511, 0), 2047.0f);
  EXPECT_EQ(block.at(0, 512, 0), 0.0f);
  EXPECT_EQ(block.at(0, 1023, 0), 511.0f);
}

TEST(StitchBlock, ConstantStaysConstantAndOversizedRejected) {
  EXPECT_EQ(extract_stitch_block(Canvas(3, 16, 2, 0.25f), make_stitch_plan(8, 1)),
            Canvas(3, 8, 2, 0.25f));
  EXPECT_THROW(extract_stitch_block(Canvas(1, 6, 1), make_stitch_plan(8, 1)), ConfigError);
  EXPECT_THROW(make_stitch_plan(7, 1), ConfigError);
}

TEST(Scatter, SingleWindowWeightsAndShapeCheck) {
  Accumulator acc(2, 10, 1);
  scatter_accumulate(acc, WindowRegion{3, 4}, Canvas(2, 4, 1, 1.0f));
  const WeightMap w = acc.weight_map();
  for (std::size_t x = 0; x < 10; ++x) EXPECT_EQ(w.at(1, x, 0), (x >= 3 && x < 7) ? 1.0f : 0.0f);
  EXPECT_THROW(scatter_accumulate(acc, WindowRegion{3, 4}, Canvas(2, 5, 1)), ShapeError);
  EXPECT_THROW(acc.normalized(), NumericalDomainError);
}

TEST(Scatter, TwoOverlappingWindowsGive121Bands) {
  const TilingPlan plan = plan_windows(24, 16, 8);
  Accumulator acc(1, 24, 1);
  for (auto s : plan.starts) scatter_accumulate(acc, WindowRegion{s, 16}, Canvas(1, 16, 1, 1.0f));
  const WeightMap w = acc.weight_map();
  for (std::size_t x = 0; x < 24; ++x) EXPECT_EQ(w.at(0, x, 0), x < 8 ? 1.0f : x < 16 ? 2.0f : 1.0f);
}

TEST(Scatter, StitchRegionWritesBackToSourceColumns) {
  const StitchPlan plan = make_stitch_plan(8, 1);
  const Canvas ramp = test::column_ramp(1, 16);
  Accumulator acc(1, 16, 1);
  scatter_accumulate(acc, StitchRegion{plan.half, plan.concat_order},
                     extract_stitch_block(ramp, plan));
  for (std::size_t x = 0; x < 16; ++x) {
    const bool covered = x < 4 || x >= 12;
    EXPECT_EQ(acc.weight()[x], covered ? 1.0 : 0.0);
    EXPECT_EQ(acc.value()[x], covered ? static_cast<double>(x) : 0.0);
  }
}

TEST(Coverage, PixelConfigurationSpotValues) {
  const TilingPlan tiling = plan_windows(2048, 1024, 128);
  const StitchPlan stitch = make_stitch_plan(1024, 2);
  const auto cover = column_coverage(tiling, &stitch);
  EXPECT_EQ(cover[0], 3.0f);
  EXPECT_EQ(cover[512], 5.0f);
  // Starts 128..1024 cover column 1024; no stitch region reaches it.
  EXPECT_EQ(cover[1024], 8.0f);
  EXPECT_EQ(*std::max_element(cover.begin(), cover.end()), 8.0f);
  const auto oracle = brute_force_coverage(2048, 1024, 128, 2);
  for (std::size_t x = 0; x < 2048; ++x) ASSERT_EQ(cover[x], static_cast<float>(oracle[x])) << x;
}

TEST(Coverage, SingleWindowNoStitchIsUniform) {
  const WeightMap w = coverage_map(3, 2, plan_windows(32, 32, 8), nullptr);
  EXPECT_EQ(w, Canvas(3, 32, 2, 1.0f));
}

TEST(Coverage, MatchesBruteForceOnRandomPlans) {
  Rng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t stride = 1 + rng.below(8);
    const std::size_t window = 2 * stride * (1 + rng.below(4));
    const std::size_t canvas = window + stride * rng.below(10);
    const std::size_t passes = rng.below(4);
    const TilingPlan tiling = plan_windows(canvas, window, stride);
    const auto oracle = brute_force_coverage(canvas, window, stride, passes);
    std::vector<float> got;
    if (passes > 0 && window <= canvas) {
      const StitchPlan stitch = make_stitch_plan(window, passes);
      got = column_coverage(tiling, &stitch);
    } else {
      got = column_coverage(tiling, nullptr);
    }
    for (std::size_t x = 0; x < canvas; ++x) {
      ASSERT_EQ(got[x], static_cast<float>(oracle[x]))
          << "W'=" << canvas << " W=" << window << " stride=" << stride << " K=" << passes;
    }
    // The accumulator's own weights agree with the coverage map.
    Accumulator acc(1, canvas, 1);
    for (auto s : tiling.starts) {
      scatter_accumulate(acc, WindowRegion{s, window}, Canvas(1, window, 1, 1.0f));
    }
    if (passes > 0) {
      const StitchPlan stitch = make_stitch_plan(window, passes);
      for (std::size_t k = 0; k < passes; ++k) {
        scatter_accumulate(acc, StitchRegion{stitch.half, stitch.concat_order},
                           Canvas(1, window, 1, 1.0f));
      }
    }
    for (std::size_t x = 0; x < canvas; ++x) ASSERT_EQ(acc.weight()[x], oracle[x]);
  }
}

TEST(Coverage, EveryColumnCovered) {
  Rng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t stride = 1 + rng.below(6);
    const std::size_t window = stride * (1 + rng.below(6));
    const std::size_t canvas = window + stride * rng.below(8);
    for (float c : column_coverage(plan_windows(canvas, window, stride), nullptr)) {
      ASSERT_GE(c, 1.0f);
    }
  }
}

TEST(GlobalCrop, RampAndFullSize) {
  const Canvas crop = global_crop(test::column_ramp(2, 16), 8);
  ASSERT_EQ(crop.width(), 8u);
  for (std::size_t x = 0; x < 8; ++x) EXPECT_EQ(crop.at(0, x, 0), static_cast<float>(x + 4));

  const Canvas big = global_crop(test::column_ramp(512, 2048), 1024);
  EXPECT_EQ(big.height(), 512u);
  EXPECT_EQ(big.width(), 1024u);
  EXPECT_EQ(big.at(0, 0, 0), 512.0f);
  EXPECT_EQ(big.at(511, 1023, 0), 1535.0f);
  EXPECT_THROW(global_crop(Canvas(2, 16, 1), 16), ConfigError);
}

TEST(GlobalCrop, PeriodicCanvasWrapPairMatchesInteriorPair) {
  const std::size_t h = 4, w = 8, period = 2 * h, width = 2 * h + w;
  const Canvas base = test::random_canvas(h, period, 2, 5);
  Canvas periodic(h, width, 2);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < width; ++x)
      for (std::size_t c = 0; c < 2; ++c) periodic.at(y, x, c) = base.at(y, x % period, c);
  const Canvas crop = global_crop(periodic, w);
  // Wrap pair (last, first) of the crop equals canvas columns (W'-W/2-1, W'-W/2).
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t c = 0; c < 2; ++c) {
      EXPECT_EQ(crop.at(y, crop.width() - 1, c), periodic.at(y, width - w / 2 - 1, c));
      EXPECT_EQ(crop.at(y, 0, c), periodic.at(y, width - w / 2, c));
    }
  }
}

}  // namespace
}  // namespace panostitch
