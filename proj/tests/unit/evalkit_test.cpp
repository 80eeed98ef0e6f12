#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "panostitch/error.hpp"
#include "panostitch/evalkit.hpp"
#include "panostitch/tensor_io.hpp"
#include "test_support.hpp"

namespace panostitch::eval {
namespace {

Eigen::MatrixXd gaussian_rows(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.normal();
  return m;
}

Eigen::MatrixXd random_orthogonal(std::size_t d, std::uint64_t seed) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian_rows(d, d, seed));
  return qr.householderQ();
}

// Trace of sqrt(S1 S2) from the eigenvalues of the (non-symmetric) product.
double fid_oracle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const Eigen::VectorXd ma = a.colwise().mean(), mb = b.colwise().mean();
  const Eigen::MatrixXd ca = a.rowwise() - ma.transpose();
  const Eigen::MatrixXd cb = b.rowwise() - mb.transpose();
  const Eigen::MatrixXd sa = ca.transpose() * ca / static_cast<double>(a.rows() - 1);
  const Eigen::MatrixXd sb = cb.transpose() * cb / static_cast<double>(b.rows() - 1);
  Eigen::EigenSolver<Eigen::MatrixXd> es(sa * sb);
  double tr_sqrt = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    tr_sqrt += std::sqrt(std::max(0.0, es.eigenvalues()[i].real()));
  }
  return (ma - mb).squaredNorm() + sa.trace() + sb.trace() - 2.0 * tr_sqrt;
}

TEST(Locations, PanoramaSizeForcesRowZero) {
  Rng rng(1);
  const std::vector<ImageDims> dims{{512, 1024}, {512, 1024}};
  const auto locs = sample_locations(dims, 1000, 512, rng);
  ASSERT_EQ(locs.size(), 1000u);
  std::size_t min_x = 1024, max_x = 0;
  for (const auto& l : locs) {
    EXPECT_EQ(l.y, 0u);
    EXPECT_LE(l.x, 512u);
    EXPECT_LT(l.image_index, 2u);
    min_x = std::min(min_x, l.x);
    max_x = std::max(max_x, l.x);
  }
  EXPECT_LT(min_x, 20u);
  EXPECT_GT(max_x, 492u);
}

TEST(Locations, SeededAndSerializable) {
  const std::vector<ImageDims> dims{{40, 60}, {50, 50}};
  Rng a(7), b(7);
  const auto la = sample_locations(dims, 50, 16, a);
  EXPECT_EQ(la, sample_locations(dims, 50, 16, b));
  test::TempDir dir;
  write_locations(la, dir / "loc.json");
  EXPECT_EQ(read_locations(dir / "loc.json"), la);
}

TEST(Locations, Errors) {
  Rng rng(0);
  const std::vector<ImageDims> dims{{40, 60}};
  EXPECT_THROW(sample_locations(dims, 5, 41, rng), ConfigError);
  EXPECT_THROW(sample_locations(dims, 0, 8, rng), ConfigError);
  const Canvas image(10, 10, 1);
  EXPECT_THROW(crop_patch(image, {0, 5, 0, 6}), BoundsError);
}

TEST(Locations, RecordedLocationsRecropBitIdentically) {
  const std::vector<Canvas> images{test::random_canvas(32, 64, 3, 1),
                                   test::random_canvas(32, 64, 3, 2)};
  const std::vector<ImageDims> dims{{32, 64}, {32, 64}};
  Rng rng(5);
  const auto locs = sample_locations(dims, 20, 32, rng);
  test::TempDir dir;
  write_locations(locs, dir / "loc.json");
  const auto first = crop_patches(images, locs);
  const auto second = crop_patches(images, read_locations(dir / "loc.json"));
  EXPECT_EQ(first, second);
  const Canvas& p = first[3];
  const auto& l = locs[3];
  EXPECT_EQ(p.at(0, 0, 1), images[l.image_index].at(l.y, l.x, 1));
}

TEST(ClipScore, FrozenExample) {
  const EmbeddingSet g = EmbeddingSet::from_rows({{1, 2, 2}, {3, 0, 4}, {0, 0, 1}});
  const EmbeddingSet r = EmbeddingSet::from_rows({{2, 1, 2}, {0, 3, 4}, {1, 0, 0}});
  // (8/9 + 16/25 + 0) / 3
  EXPECT_NEAR(clip_score(g, r), 344.0 / 675.0, 1e-15);
}

TEST(ClipScore, IdenticalIsExactlyOneAndOrthogonalIsZero) {
  const EmbeddingSet a(gaussian_rows(100, 32, 3));
  EXPECT_EQ(clip_score(a, a), 1.0);
  const Eigen::MatrixXd q = random_orthogonal(8, 4);
  const EmbeddingSet cols_a(q.leftCols(4).transpose());
  const EmbeddingSet cols_b(q.rightCols(4).transpose());
  EXPECT_NEAR(clip_score(cols_a, cols_b), 0.0, 1e-7);
}

TEST(ClipScore, InvariantToPositiveRescaling) {
  const Eigen::MatrixXd a = gaussian_rows(50, 10, 1), b = gaussian_rows(50, 10, 2);
  Rng rng(3);
  Eigen::MatrixXd scaled = a;
  for (Eigen::Index i = 0; i < scaled.rows(); ++i) scaled.row(i) *= 0.01 + 100 * rng.uniform_open0();
  EXPECT_NEAR(clip_score(EmbeddingSet(a), EmbeddingSet(b)),
              clip_score(EmbeddingSet(scaled), EmbeddingSet(b)), 1e-12);
}

TEST(ClipScore, Errors) {
  const EmbeddingSet a = EmbeddingSet::from_rows({{1, 0}, {0, 0}});
  const EmbeddingSet b = EmbeddingSet::from_rows({{1, 0}, {0, 1}});
  EXPECT_THROW(clip_score(a, b), DegenerateEmbeddingError);
  EXPECT_THROW(clip_score(b, EmbeddingSet::from_rows({{1, 0}})), ShapeError);
}

TEST(MatrixSqrt, KnownCases) {
  EXPECT_TRUE(matrix_sqrt_psd(Eigen::MatrixXd::Identity(5, 5)).isApprox(
      Eigen::MatrixXd::Identity(5, 5), 1e-14));
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
  d(0, 0) = 4;
  d(1, 1) = 9;
  const Eigen::MatrixXd r = matrix_sqrt_psd(d);
  EXPECT_NEAR(r(0, 0), 2.0, 1e-14);
  EXPECT_NEAR(r(1, 1), 3.0, 1e-14);
  EXPECT_NEAR(r(0, 1), 0.0, 1e-14);
}

TEST(MatrixSqrt, RandomPsdResidual) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Eigen::MatrixXd a = gaussian_rows(16, 16, seed);
    const Eigen::MatrixXd s = a.transpose() * a;
    const Eigen::MatrixXd r = matrix_sqrt_psd(s);
    ASSERT_LE((r * r - s).norm() / s.norm(), 1e-6) << seed;
    ASSERT_LE((r - r.transpose()).norm(), 1e-10);
  }
}

TEST(MatrixSqrt, RankDeficientClampsNegligibleEigenvalues) {
  const Eigen::MatrixXd a = gaussian_rows(3, 8, 9);
  const Eigen::MatrixXd s = a.transpose() * a;  // rank 3
  const Eigen::MatrixXd r = matrix_sqrt_psd(s);
  EXPECT_LE((r * r - s).norm() / s.norm(), 1e-6);
}

TEST(MatrixSqrt, DomainErrors) {
  Eigen::MatrixXd asym = Eigen::MatrixXd::Identity(2, 2);
  asym(0, 1) = 0.5;
  EXPECT_THROW(matrix_sqrt_psd(asym), NumericalDomainError);
  Eigen::MatrixXd indefinite = Eigen::MatrixXd::Identity(2, 2);
  indefinite(1, 1) = -1.0;
  EXPECT_THROW(matrix_sqrt_psd(indefinite), NumericalDomainError);
}

TEST(Fid, FrozenSmallExample) {
  const EmbeddingSet a = EmbeddingSet::from_rows({{0.5f, -1.0f, 2.0f},
                                                  {1.5f, 0.25f, -0.5f},
                                                  {-0.75f, 1.0f, 0.0f},
                                                  {2.0f, 2.0f, 1.0f},
                                                  {0.0f, -0.5f, 0.5f},
                                                  {1.0f, 0.0f, -1.5f}});
  const EmbeddingSet b = EmbeddingSet::from_rows({{1.0f, 1.0f, 1.0f},
                                                  {0.0f, 2.0f, -1.0f},
                                                  {3.0f, 0.5f, 0.5f},
                                                  {-1.0f, 0.0f, 2.0f},
                                                  {0.5f, -2.0f, 0.0f}});
  // scipy.linalg.sqrtm reference.
  EXPECT_NEAR(fid(a, b), 0.5636073241812065, 1e-10);
  EXPECT_NEAR(fid(b, a), 0.5636073241812065, 1e-10);
}

TEST(Fid, SelfDistanceIsZero) {
  const EmbeddingSet a(gaussian_rows(200, 16, 1));
  EXPECT_LE(std::abs(fid(a, a)), 1e-6);
  EXPECT_GE(fid(a, a), 0.0);
}

TEST(Fid, MatchesEigenvalueOracleAndIsSymmetric) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Eigen::MatrixXd a = gaussian_rows(80, 6, seed);
    Eigen::MatrixXd b = gaussian_rows(60, 6, seed + 100) * 1.5;
    b.col(0).array() += 0.7;
    const double f = fid(EmbeddingSet(a), EmbeddingSet(b));
    EXPECT_NEAR(f, fid_oracle(a, b), 1e-8);
    EXPECT_NEAR(f, fid(EmbeddingSet(b), EmbeddingSet(a)), 1e-6);
  }
}

TEST(Fid, InvariantUnderSharedRotation) {
  const Eigen::MatrixXd a = gaussian_rows(120, 8, 1);
  Eigen::MatrixXd b = gaussian_rows(100, 8, 2);
  b.col(3) *= 2.0;
  const Eigen::MatrixXd q = random_orthogonal(8, 3);
  EXPECT_NEAR(fid(EmbeddingSet(a), EmbeddingSet(b)),
              fid(EmbeddingSet(a * q), EmbeddingSet(b * q)), 1e-5);
}

TEST(Fid, MeanOffsetGivesSquaredNorm) {
  const std::size_t n = 5000, d = 16;
  const Eigen::MatrixXd mix = gaussian_rows(d, d, 77) / 2.0;
  const Eigen::MatrixXd a = gaussian_rows(n, d, 10) * mix;
  Eigen::MatrixXd b = gaussian_rows(n, d, 11) * mix;
  Eigen::RowVectorXd delta(d);
  Rng rng(12);
  for (std::size_t j = 0; j < d; ++j) delta(static_cast<Eigen::Index>(j)) = 2.0 * rng.normal();
  b.rowwise() += delta;
  const double expected = delta.squaredNorm();
  EXPECT_LE(std::abs(fid(EmbeddingSet(a), EmbeddingSet(b)) - expected), 0.05 * expected);
}

TEST(Fid, NeedsTwoSamples) {
  const EmbeddingSet one = EmbeddingSet::from_rows({{1, 2}});
  const EmbeddingSet two = EmbeddingSet::from_rows({{1, 2}, {3, 4}});
  EXPECT_THROW(fid(one, two), InsufficientSamplesError);
  EXPECT_THROW(fid(two, EmbeddingSet::from_rows({{1, 2, 3}, {1, 2, 3}})), ShapeError);
}

TEST(EmbeddingSet, TensorRoundTripAndValidation) {
  const EmbeddingSet a = EmbeddingSet::from_rows({{1, 2, 3}, {4, 5, 6}});
  const TensorData t = a.to_tensor();
  EXPECT_EQ(t.dims, (std::vector<std::uint32_t>{2, 3}));
  EXPECT_EQ(EmbeddingSet::from_tensor(t).rows(), a.rows());
  EXPECT_THROW(EmbeddingSet::from_tensor(TensorData{{3}, {1, 2, 3}}), FormatError);
  EXPECT_THROW(EmbeddingSet::from_rows({{1, 2}, {3}}), ShapeError);
  EXPECT_THROW(EmbeddingSet::from_rows({}), DimensionError);
}

TEST(Seam, ConstantImageHasZeroRatio) {
  const SeamStats s = seam_discontinuity(Canvas(4, 16, 3, 0.3f));
  EXPECT_EQ(s.wrap, 0.0);
  EXPECT_EQ(s.ratio, 0.0);
}

TEST(Seam, RampHasRatioWidthMinusOne) {
  const SeamStats s = seam_discontinuity(test::column_ramp(3, 20, 2));
  EXPECT_DOUBLE_EQ(s.wrap, 19.0);
  EXPECT_DOUBLE_EQ(s.interior, 1.0);
  EXPECT_DOUBLE_EQ(s.ratio, 19.0);
}

TEST(Seam, WrapConsistentImagesHaveRatioNearOne) {
  // Triangle wave with integer period: every neighbor pair differs by 1.
  Canvas tri(2, 32, 1);
  for (std::size_t x = 0; x < 32; ++x) {
    tri.at(0, x, 0) = tri.at(1, x, 0) = static_cast<float>(x <= 16 ? x : 32 - x);
  }
  EXPECT_DOUBLE_EQ(seam_discontinuity(tri).ratio, 1.0);

  // Sinusoids over evenly spread phases.
  const std::size_t w = 64, rows = 16;
  Canvas sine(rows, w, 1);
  for (std::size_t y = 0; y < rows; ++y)
    for (std::size_t x = 0; x < w; ++x)
      sine.at(y, x, 0) = static_cast<float>(std::sin(2 * std::numbers::pi * x / w +
                                                     2 * std::numbers::pi * y / rows));
  EXPECT_NEAR(seam_discontinuity(sine).ratio, 1.0, 0.01);
}

TEST(Seam, NarrowImageRejected) {
  EXPECT_THROW(seam_discontinuity(Canvas(2, 2, 1)), DimensionError);
}

TEST(Seam, ColumnJumpPeak) {
  Canvas c = test::column_ramp(1, 10);
  EXPECT_DOUBLE_EQ(column_jump_peak(c), 1.0);
  c.at(0, 5, 0) += 8.0f;  // jumps: 1,1,1,1,9,7,1,1,1
  EXPECT_NEAR(column_jump_peak(c), 9.0 / (23.0 / 9.0), 1e-12);
}

TEST(Report, MeanAndSampleStd) {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const MeanStd s = summarize(v);
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_NEAR(s.stddev, std::sqrt(5.0 / 3.0), 1e-15);
  const std::vector<double> one{7.0};
  EXPECT_EQ(summarize(one).stddev, 0.0);
}

TEST(Report, BuildAndSerialize) {
  const EmbeddingSet real(gaussian_rows(30, 4, 1));
  std::vector<EmbeddingSet> gens{EmbeddingSet(gaussian_rows(30, 4, 2)),
                                 EmbeddingSet(gaussian_rows(30, 4, 3))};
  const std::vector<double> seams{1.0, 1.2};
  const EvalReport r = build_report(gens, real, seams, "grid-mean");
  EXPECT_EQ(r.repeats, 2u);
  EXPECT_GE(r.fid.stddev, 0.0);
  EXPECT_NEAR(r.seam_ratio.mean, 1.1, 1e-12);
  const auto j = to_json(r);
  EXPECT_EQ(j["repeats"], 2);
  EXPECT_EQ(j["embedding_source"], "grid-mean");
  EXPECT_TRUE(j["clip_score"].contains("mean"));
  EXPECT_TRUE(j["clip_score"].contains("std"));
}

}  // namespace
}  // namespace panostitch::eval
