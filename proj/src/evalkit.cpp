#include "panostitch/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "panostitch/error.hpp"

namespace panostitch::eval {

void to_json(nlohmann::json& j, const PatchLocation& loc) {
  j = nlohmann::json{
      {"image_index", loc.image_index}, {"x", loc.x}, {"y", loc.y}, {"size", loc.size}};
}

void from_json(const nlohmann::json& j, PatchLocation& loc) {
  j.at("image_index").get_to(loc.image_index);
  j.at("x").get_to(loc.x);
  j.at("y").get_to(loc.y);
  j.at("size").get_to(loc.size);
}

std::vector<PatchLocation> sample_locations(std::span<const ImageDims> images, std::size_t count,
                                            std::size_t size, Rng& rng) {
  if (images.empty()) throw ConfigError("sample_locations: no images");
  if (count == 0) throw ConfigError("sample_locations: count must be at least 1");
  if (size == 0) throw ConfigError("sample_locations: patch size must be positive");
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (size > images[i].height || size > images[i].width) {
      std::ostringstream msg;
      msg << "patch size " << size << " exceeds image " << i << " (" << images[i].height << "x"
          << images[i].width << ")";
      throw ConfigError(msg.str());
    }
  }
  std::vector<PatchLocation> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    PatchLocation loc;
    loc.image_index = static_cast<std::size_t>(rng.below(images.size()));
    const auto& dims = images[loc.image_index];
    loc.x = static_cast<std::size_t>(rng.below(dims.width - size + 1));
    loc.y = static_cast<std::size_t>(rng.below(dims.height - size + 1));
    loc.size = size;
    out.push_back(loc);
  }
  return out;
}

void write_locations(const std::vector<PatchLocation>& locations,
                     const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << nlohmann::json(locations).dump(1) << "\n";
}

std::vector<PatchLocation> read_locations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in).get<std::vector<PatchLocation>>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed locations file " + path.string() + ": " + e.what());
  }
}

Canvas crop_patch(const Canvas& image, const PatchLocation& loc) {
  if (loc.size == 0 || loc.x + loc.size > image.width() || loc.y + loc.size > image.height()) {
    std::ostringstream msg;
    msg << "patch at (" << loc.x << ", " << loc.y << ") size " << loc.size
        << " does not fit image " << image.height() << "x" << image.width();
    throw BoundsError(msg.str());
  }
  Canvas out(loc.size, loc.size, image.channels());
  for (std::size_t y = 0; y < loc.size; ++y) {
    for (std::size_t x = 0; x < loc.size; ++x) {
      for (std::size_t c = 0; c < image.channels(); ++c) {
        out.at(y, x, c) = image.at(loc.y + y, loc.x + x, c);
      }
    }
  }
  return out;
}

std::vector<Canvas> crop_patches(std::span<const Canvas> images,
                                 std::span<const PatchLocation> locations) {
  std::vector<Canvas> out;
  out.reserve(locations.size());
  for (const auto& loc : locations) {
    if (loc.image_index >= images.size()) {
      throw BoundsError("patch refers to image " + std::to_string(loc.image_index) +
                        " but only " + std::to_string(images.size()) + " were given");
    }
    out.push_back(crop_patch(images[loc.image_index], loc));
  }
  return out;
}

EmbeddingSet::EmbeddingSet(Eigen::MatrixXd rows) : rows_(std::move(rows)) {
  if (rows_.rows() < 1 || rows_.cols() < 1) {
    throw DimensionError("embedding set needs at least one row and one column");
  }
  if (!rows_.allFinite()) throw NumericalDomainError("embedding set contains NaN or Inf");
}

EmbeddingSet EmbeddingSet::from_tensor(const TensorData& tensor) {
  if (tensor.dims.size() != 2) {
    throw FormatError("rank", "embedding file must be rank 2 (N, D), got rank " +
                                  std::to_string(tensor.dims.size()));
  }
  const auto n = static_cast<Eigen::Index>(tensor.dims[0]);
  const auto d = static_cast<Eigen::Index>(tensor.dims[1]);
  Eigen::MatrixXd rows(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) rows(i, j) = tensor.values[i * d + j];
  }
  return EmbeddingSet(std::move(rows));
}

EmbeddingSet EmbeddingSet::from_rows(const std::vector<std::vector<float>>& rows) {
  if (rows.empty()) throw DimensionError("embedding set needs at least one row");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) {
      throw ShapeError("embedding rows differ in length");
    }
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return EmbeddingSet(std::move(m));
}

TensorData EmbeddingSet::to_tensor() const {
  TensorData t;
  t.dims = {static_cast<std::uint32_t>(rows_.rows()), static_cast<std::uint32_t>(rows_.cols())};
  t.values.reserve(static_cast<std::size_t>(rows_.size()));
  for (Eigen::Index i = 0; i < rows_.rows(); ++i) {
    for (Eigen::Index j = 0; j < rows_.cols(); ++j) {
      t.values.push_back(static_cast<float>(rows_(i, j)));
    }
  }
  return t;
}

double clip_score(const EmbeddingSet& gen, const EmbeddingSet& real) {
  if (gen.count() != real.count() || gen.dim() != real.dim()) {
    std::ostringstream msg;
    msg << "clip_score: sets must pair up, got " << gen.count() << "x" << gen.dim() << " and "
        << real.count() << "x" << real.dim();
    throw ShapeError(msg.str());
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < gen.rows().rows(); ++i) {
    const auto g = gen.rows().row(i);
    const auto r = real.rows().row(i);
    const double gg = g.squaredNorm();
    const double rr = r.squaredNorm();
    if (gg == 0.0 || rr == 0.0) {
      throw DegenerateEmbeddingError("clip_score: zero-norm embedding at pair " +
                                     std::to_string(i));
    }
    const double cosine = g.dot(r) / (std::sqrt(gg) * std::sqrt(rr));
    total += std::clamp(cosine, -1.0, 1.0);
  }
  return total / static_cast<double>(gen.count());
}

Eigen::MatrixXd matrix_sqrt_psd(const Eigen::MatrixXd& s) {
  if (s.rows() != s.cols() || s.rows() == 0) {
    throw NumericalDomainError("matrix_sqrt_psd: need a non-empty square matrix");
  }
  if (!s.allFinite()) throw NumericalDomainError("matrix_sqrt_psd: non-finite input");
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw NumericalDomainError("matrix_sqrt_psd: matrix is not symmetric");
  }
  const Eigen::MatrixXd sym = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw NumericalDomainError("matrix_sqrt_psd: eigendecomposition failed");
  }
  Eigen::VectorXd values = solver.eigenvalues();
  const double radius = std::max(1.0, values.cwiseAbs().maxCoeff());
  if (values.minCoeff() < -1e-8 * radius) {
    std::ostringstream msg;
    msg << "matrix_sqrt_psd: eigenvalue " << values.minCoeff() << " is negative beyond tolerance";
    throw NumericalDomainError(msg.str());
  }
  values = values.cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd& vectors = solver.eigenvectors();
  Eigen::MatrixXd root = vectors * values.asDiagonal() * vectors.transpose();
  return 0.5 * (root + root.transpose());
}

Eigen::MatrixXd covariance(const Eigen::MatrixXd& rows) {
  if (rows.rows() < 2) throw InsufficientSamplesError("covariance needs at least 2 samples");
  const Eigen::RowVectorXd mean = rows.colwise().mean();
  const Eigen::MatrixXd centered = rows.rowwise() - mean;
  return (centered.transpose() * centered) / static_cast<double>(rows.rows() - 1);
}

double fid(const EmbeddingSet& gen, const EmbeddingSet& real) {
  if (gen.count() < 2 || real.count() < 2) {
    throw InsufficientSamplesError("fid needs at least 2 embeddings per set");
  }
  if (gen.dim() != real.dim()) {
    throw ShapeError("fid: embedding dimensions differ (" + std::to_string(gen.dim()) + " vs " +
                     std::to_string(real.dim()) + ")");
  }
  const Eigen::RowVectorXd mu1 = gen.rows().colwise().mean();
  const Eigen::RowVectorXd mu2 = real.rows().colwise().mean();
  const Eigen::MatrixXd s1 = covariance(gen.rows());
  const Eigen::MatrixXd s2 = covariance(real.rows());

  const Eigen::MatrixXd root1 = matrix_sqrt_psd(s1);
  Eigen::MatrixXd inner = root1 * s2 * root1;
  inner = 0.5 * (inner + inner.transpose());
  const double cross = matrix_sqrt_psd(inner).trace();

  const double value = (mu1 - mu2).squaredNorm() + s1.trace() + s2.trace() - 2.0 * cross;
  return std::max(value, 0.0);
}

SeamStats seam_discontinuity(const Canvas& panorama) {
  if (panorama.width() < 3) throw DimensionError("seam_discontinuity needs width >= 3");
  const std::size_t h = panorama.height();
  const std::size_t w = panorama.width();
  const std::size_t ch = panorama.channels();
  auto column_gap = [&](std::size_t a, std::size_t b) {
    double sum = 0.0;
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t c = 0; c < ch; ++c) {
        sum += std::abs(static_cast<double>(panorama.at(y, a, c)) - panorama.at(y, b, c));
      }
    }
    return sum / static_cast<double>(h * ch);
  };
  SeamStats stats;
  stats.wrap = column_gap(w - 1, 0);
  double interior = 0.0;
  for (std::size_t x = 0; x + 1 < w; ++x) interior += column_gap(x, x + 1);
  stats.interior = interior / static_cast<double>(w - 1);
  stats.ratio = stats.wrap / std::max(stats.interior, 1e-12);
  return stats;
}

double column_jump_peak(const Canvas& panorama) {
  if (panorama.width() < 3) throw DimensionError("column_jump_peak needs width >= 3");
  std::vector<double> gaps;
  gaps.reserve(panorama.width() - 1);
  for (std::size_t x = 0; x + 1 < panorama.width(); ++x) {
    double sum = 0.0;
    for (std::size_t y = 0; y < panorama.height(); ++y) {
      for (std::size_t c = 0; c < panorama.channels(); ++c) {
        sum += std::abs(static_cast<double>(panorama.at(y, x, c)) - panorama.at(y, x + 1, c));
      }
    }
    gaps.push_back(sum / static_cast<double>(panorama.height() * panorama.channels()));
  }
  const double mean = std::accumulate(gaps.begin(), gaps.end(), 0.0) / gaps.size();
  return *std::max_element(gaps.begin(), gaps.end()) / std::max(mean, 1e-12);
}

MeanStd summarize(std::span<const double> values) {
  MeanStd out;
  if (values.empty()) return out;
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

nlohmann::json to_json(const EvalReport& report) {
  auto pack = [](const MeanStd& m) { return nlohmann::json{{"mean", m.mean}, {"std", m.stddev}}; };
  return nlohmann::json{{"clip_score", pack(report.clip_score)},
                        {"fid", pack(report.fid)},
                        {"seam_ratio", pack(report.seam_ratio)},
                        {"repeats", report.repeats},
                        {"embedding_source", report.embedding_source}};
}

EvalReport build_report(std::span<const EmbeddingSet> generated, const EmbeddingSet& real,
                        std::span<const double> seam_ratios, std::string embedding_source) {
  if (generated.empty()) throw ConfigError("report needs at least one generated set");
  std::vector<double> clips;
  std::vector<double> fids;
  for (const auto& gen : generated) {
    clips.push_back(clip_score(gen, real));
    fids.push_back(fid(gen, real));
  }
  EvalReport report;
  report.clip_score = summarize(clips);
  report.fid = summarize(fids);
  report.seam_ratio = summarize(seam_ratios);
  report.repeats = generated.size();
  report.embedding_source = std::move(embedding_source);
  return report;
}

}  // namespace panostitch::eval
