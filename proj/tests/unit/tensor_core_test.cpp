#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include <gtest/gtest.h>

#include "panostitch/canvas.hpp"
#include "panostitch/error.hpp"
#include "panostitch/image_io.hpp"
#include "panostitch/rng.hpp"
#include "panostitch/tensor_io.hpp"
#include "test_support.hpp"

namespace panostitch {
namespace {

using test::TempDir;

TEST(Canvas, ZeroDimensionRejected) {
  EXPECT_THROW(Canvas(0, 4, 1), DimensionError);
  EXPECT_THROW(Canvas(4, 0, 1), DimensionError);
  EXPECT_THROW(Canvas(4, 4, 0), DimensionError);
}

TEST(Canvas, NanRejectedOnConstruction) {
  std::vector<float> data(4, 0.0f);
  data[2] = std::numeric_limits<float>::quiet_NaN();
  EXPECT_THROW(Canvas(2, 2, 1, data), NumericalDomainError);
  EXPECT_THROW(Canvas(2, 2, 1, std::vector<float>(3)), ShapeError);
}

TEST(Canvas, RowMajorChannelLast) {
  Canvas c(2, 3, 2);
  EXPECT_EQ(c.index(1, 2, 1), (1 * 3 + 2) * 2 + 1);
  c.at(1, 2, 1) = 5.0f;
  EXPECT_EQ(c.data()[11], 5.0f);
}

TEST(Canvas, ColumnsSliceAndBounds) {
  const Canvas ramp = test::column_ramp(3, 8, 2);
  const Canvas mid = ramp.columns(2, 3);
  ASSERT_EQ(mid.width(), 3u);
  EXPECT_EQ(mid.at(2, 0, 1), 2.0f);
  EXPECT_EQ(mid.at(0, 2, 0), 4.0f);
  EXPECT_THROW(ramp.columns(6, 3), BoundsError);
}

TEST(Canvas, ElementwiseHelpers) {
  const Canvas a(2, 2, 1, 3.0f);
  const Canvas b(2, 2, 1, 1.5f);
  EXPECT_EQ(add(a, b), Canvas(2, 2, 1, 4.5f));
  EXPECT_EQ(scale(a, 2.0f), Canvas(2, 2, 1, 6.0f));
  EXPECT_EQ(divide(a, b), Canvas(2, 2, 1, 2.0f));
  EXPECT_THROW(divide(a, Canvas(2, 2, 1)), NumericalDomainError);
  EXPECT_THROW(add(a, Canvas(2, 3, 1)), ShapeError);
  EXPECT_DOUBLE_EQ(max_abs_diff(a, b), 1.5);
}

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
  EXPECT_EQ(test::random_canvas(8, 16, 3, 9), test::random_canvas(8, 16, 3, 9));
}

TEST(Rng, EngineIsStandardMt19937_64) {
  // The 10000th output of a default-seeded mt19937_64 is fixed by the C++ standard.
  Rng rng(5489u);
  std::uint64_t v = 0;
  for (int i = 0; i < 10000; ++i) v = rng.next_u64();
  EXPECT_EQ(v, 9981545732273789042ull);
}

TEST(Rng, DifferentSeedsDifferAlmostEverywhere) {
  const Canvas a = test::random_canvas(64, 256, 4, 1);
  const Canvas b = test::random_canvas(64, 256, 4, 2);
  std::size_t equal = 0;
  for (std::size_t i = 0; i < a.size(); ++i) equal += a.data()[i] == b.data()[i];
  EXPECT_LE(static_cast<double>(equal), 0.01 * static_cast<double>(a.size()));
}

TEST(Rng, GaussianMomentsOverSeeds) {
  for (std::uint64_t seed : {0ull, 1ull, 7ull, 123456789ull, 0xdeadbeefull}) {
    const Canvas c = test::random_canvas(64, 256, 4, seed);
    double sum = 0.0, sq = 0.0;
    for (float v : c.data()) sum += v;
    const double mean = sum / static_cast<double>(c.size());
    for (float v : c.data()) sq += (v - mean) * (v - mean);
    const double var = sq / static_cast<double>(c.size() - 1);
    EXPECT_GE(mean, -0.05) << seed;
    EXPECT_LE(mean, 0.05) << seed;
    EXPECT_GE(var, 0.9) << seed;
    EXPECT_LE(var, 1.1) << seed;
  }
}

TEST(Rng, BelowIsInRangeAndCoversAllValues) {
  Rng rng(3);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto v = rng.below(7);
    ASSERT_LT(v, 7u);
    ++hits[v];
  }
  for (int h : hits) EXPECT_GT(h, 800);
  EXPECT_THROW(rng.below(0), ConfigError);
}

TEST(Rng, UniformOpenAtZero) {
  Rng rng(11);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform_open0();
    ASSERT_GT(u, 0.0);
    ASSERT_LE(u, 1.0);
  }
}

TEST(Rng, DeriveSeedSeparatesStreams) {
  EXPECT_NE(derive_seed(0, 1, 2), derive_seed(0, 2, 1));
  EXPECT_NE(derive_seed(0, 1, 2, 0), derive_seed(0, 1, 2, 1));
  EXPECT_NE(derive_seed(0, 1, 2), derive_seed(1, 1, 2));
  EXPECT_EQ(derive_seed(9, 3, 4, 5), derive_seed(9, 3, 4, 5));
}

TEST(Ptsr, TwoByTwoZeroCanvasIs35Bytes) {
  const std::string bytes = encode_ptsr(to_tensor_data(Canvas(2, 2, 1)));
  ASSERT_EQ(bytes.size(), 35u);
  EXPECT_EQ(bytes.substr(0, 4), "PTSR");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), kPtsrVersion);
  EXPECT_EQ(static_cast<unsigned char>(bytes[5]), kPtsrFloat32);
  EXPECT_EQ(static_cast<unsigned char>(bytes[6]), 3);
}

TEST(Ptsr, LittleEndianLayout) {
  TensorData t{{2}, {1.0f, -2.5f}};
  const std::string bytes = encode_ptsr(t);
  ASSERT_EQ(bytes.size(), 4u + 3u + 4u + 8u);
  const unsigned char dim0[4] = {2, 0, 0, 0};
  EXPECT_EQ(std::memcmp(bytes.data() + 7, dim0, 4), 0);
  // 1.0f = 0x3F800000
  const unsigned char one[4] = {0x00, 0x00, 0x80, 0x3F};
  EXPECT_EQ(std::memcmp(bytes.data() + 11, one, 4), 0);
}

TEST(Ptsr, RoundTripIsBitExact) {
  TempDir dir;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng shape(seed);
    const Canvas c = test::random_canvas(1 + shape.below(9), 1 + shape.below(17),
                                         1 + shape.below(5), seed);
    write_tensor(c, dir / "c.ptsr");
    EXPECT_EQ(read_tensor(dir / "c.ptsr"), c);
  }
}

TEST(Ptsr, ErrorsNameTheField) {
  const std::string good = encode_ptsr(to_tensor_data(Canvas(2, 2, 1)));
  auto field_of = [](std::string bytes) {
    try {
      decode_ptsr(bytes);
    } catch (const FormatError& e) {
      return e.field();
    }
    return std::string("none");
  };

  std::string bad = good;
  bad.replace(0, 4, "XXXX");
  try {
    decode_ptsr(bad);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.field(), "magic");
    EXPECT_STREQ(e.what(), "bad magic");
  }

  bad = good;
  bad[4] = 9;
  EXPECT_EQ(field_of(bad), "version");
  bad = good;
  bad[5] = 1;
  EXPECT_EQ(field_of(bad), "dtype");
  EXPECT_EQ(field_of(good.substr(0, 30)), "payload");
  EXPECT_EQ(field_of(good + "x"), "payload");
  EXPECT_EQ(field_of(good.substr(0, 9)), "dims");
}

TEST(Ptsr, NonCanvasRankRejectedAsCanvas) {
  TensorData t{{4}, {1, 2, 3, 4}};
  try {
    to_canvas(t);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.field(), "rank");
  }
}

TEST(ImageIo, MidpointMapsTo128AndClamps) {
  TempDir dir;
  Canvas c(4, 5, 1, 0.0f);
  c.at(0, 0, 0) = -3.0f;
  c.at(0, 1, 0) = 7.0f;
  export_image(c, dir / "m.png", {});
  const Canvas back = import_image(dir / "m.png", ValueRange{0.0f, 255.0f});
  EXPECT_EQ(back.at(1, 1, 0), 128.0f);
  EXPECT_EQ(back.at(0, 0, 0), 0.0f);
  EXPECT_EQ(back.at(0, 1, 0), 255.0f);
}

TEST(ImageIo, UnsupportedChannelCounts) {
  TempDir dir;
  EXPECT_THROW(export_image(Canvas(2, 2, 2), dir / "a.png", {}), ConfigError);
  EXPECT_THROW(export_image(Canvas(2, 2, 4), dir / "b.png", {}), ConfigError);
}

TEST(ImageIo, RgbRoundTripWithinQuantization) {
  TempDir dir;
  const Canvas c = test::random_canvas(16, 24, 3, 4);
  export_image(c, dir / "rgb.png", {});
  const Canvas back = import_image(dir / "rgb.png", {});
  ASSERT_TRUE(back.same_shape(c));
  // Half of one 8-bit level over a range of width 2.
  const double step = 1.0 / 255.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double clamped = std::clamp(static_cast<double>(c.data()[i]), -1.0, 1.0);
    ASSERT_LE(std::abs(back.data()[i] - clamped), step + 1e-6);
  }
}

}  // namespace
}  // namespace panostitch
