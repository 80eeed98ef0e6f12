#pragma once

// PTSR tensor files.
//
//   offset  size        field
//   0       4           magic, ASCII "PTSR"
//   4       1           version (1)
//   5       1           dtype code (0 = float32)
//   6       1           rank
//   7       4 * rank    dims, u32 little-endian, outermost first
//   ...     4 * prod    payload, float32 little-endian, row-major
//
// Canvases are stored as rank 3 (height, width, channels). Embedding sets use
// rank 2 (N, D) and single embeddings rank 1.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "panostitch/canvas.hpp"

namespace panostitch {

inline constexpr std::uint8_t kPtsrVersion = 1;
inline constexpr std::uint8_t kPtsrFloat32 = 0;

// Rank-generic tensor as it appears on disk / on the wire.
struct TensorData {
  std::vector<std::uint32_t> dims;
  std::vector<float> values;

  std::size_t element_count() const noexcept;
  friend bool operator==(const TensorData&, const TensorData&) = default;
};

std::string encode_ptsr(const TensorData& tensor);
// Throws FormatError naming the offending field.
TensorData decode_ptsr(std::span<const std::uint8_t> bytes);
TensorData decode_ptsr(const std::string& bytes);

TensorData to_tensor_data(const Canvas& canvas);
// Requires rank 3.
Canvas to_canvas(const TensorData& tensor);

void write_tensor_data(const TensorData& tensor, const std::filesystem::path& path);
TensorData read_tensor_data(const std::filesystem::path& path);

void write_tensor(const Canvas& canvas, const std::filesystem::path& path);
Canvas read_tensor(const std::filesystem::path& path);

}  // namespace panostitch
