#pragma once

// Patch-based evaluation: recorded-location crops, CLIP-score (mean paired
// cosine similarity), FID on whatever embedding set is supplied, and the
// wrap-seam discontinuity ratio.

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "panostitch/canvas.hpp"
#include "panostitch/rng.hpp"
#include "panostitch/tensor_io.hpp"

namespace panostitch::eval {

struct ImageDims {
  std::size_t height = 0;
  std::size_t width = 0;
};

struct PatchLocation {
  std::size_t image_index = 0;
  std::size_t x = 0;
  std::size_t y = 0;
  std::size_t size = 0;

  friend bool operator==(const PatchLocation&, const PatchLocation&) = default;
};

void to_json(nlohmann::json& j, const PatchLocation& loc);
void from_json(const nlohmann::json& j, PatchLocation& loc);

// Uniform image index, then uniform offsets among those that keep the square
// inside the image. ConfigError when size exceeds any image dimension.
std::vector<PatchLocation> sample_locations(std::span<const ImageDims> images, std::size_t count,
                                            std::size_t size, Rng& rng);

void write_locations(const std::vector<PatchLocation>& locations,
                     const std::filesystem::path& path);
std::vector<PatchLocation> read_locations(const std::filesystem::path& path);

// BoundsError if the location does not fit.
Canvas crop_patch(const Canvas& image, const PatchLocation& loc);
std::vector<Canvas> crop_patches(std::span<const Canvas> images,
                                 std::span<const PatchLocation> locations);

// N x D embeddings, one row per patch.
class EmbeddingSet {
 public:
  explicit EmbeddingSet(Eigen::MatrixXd rows);
  // Rank-2 PTSR tensor (N, D).
  static EmbeddingSet from_tensor(const TensorData& tensor);
  static EmbeddingSet from_rows(const std::vector<std::vector<float>>& rows);
  TensorData to_tensor() const;

  std::size_t count() const noexcept { return static_cast<std::size_t>(rows_.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(rows_.cols()); }
  const Eigen::MatrixXd& rows() const noexcept { return rows_; }

 private:
  Eigen::MatrixXd rows_;
};

// Mean over paired rows of cos(gen_i, real_i).
double clip_score(const EmbeddingSet& gen, const EmbeddingSet& real);

// Symmetric PSD square root through a symmetric eigendecomposition.
// Eigenvalues down to -1e-8 (relative to max(1, spectral radius)) are clamped
// to zero; anything more negative, or an asymmetric input, is a
// NumericalDomainError.
Eigen::MatrixXd matrix_sqrt_psd(const Eigen::MatrixXd& s);

// Sample covariance with 1/(N-1).
Eigen::MatrixXd covariance(const Eigen::MatrixXd& rows);

// |mu1 - mu2|^2 + Tr(S1 + S2 - 2 sqrt(S1^1/2 S2 S1^1/2)), clamped at 0.
double fid(const EmbeddingSet& gen, const EmbeddingSet& real);

struct SeamStats {
  double wrap = 0.0;      // mean |last column - first column|
  double interior = 0.0;  // mean over adjacent interior column pairs
  double ratio = 0.0;     // wrap / max(interior, 1e-12)
};

// Width must be at least 3.
SeamStats seam_discontinuity(const Canvas& panorama);

// Largest adjacent-column jump relative to the mean jump. A visible internal
// seam (e.g. from a too-large stride) shows up as a large peak.
double column_jump_peak(const Canvas& panorama);

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for one value
};
MeanStd summarize(std::span<const double> values);

struct EvalReport {
  MeanStd clip_score;
  MeanStd fid;
  MeanStd seam_ratio;
  std::size_t repeats = 0;
  std::string embedding_source;
};

nlohmann::json to_json(const EvalReport& report);

// One entry per generation repeat; seam values may be empty.
EvalReport build_report(std::span<const EmbeddingSet> generated, const EmbeddingSet& real,
                        std::span<const double> seam_ratios, std::string embedding_source);

}  // namespace panostitch::eval
