#include "panostitch/tensor_io.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "panostitch/error.hpp"

namespace panostitch {
namespace {

constexpr char kMagic[4] = {'P', 'T', 'S', 'R'};
constexpr std::size_t kHeaderSize = 7;

void put_u32(std::string& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) {
    out.push_back(static_cast<char>((v >> shift) & 0xffu));
  }
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  return static_cast<std::uint32_t>(bytes[offset]) |
         (static_cast<std::uint32_t>(bytes[offset + 1]) << 8) |
         (static_cast<std::uint32_t>(bytes[offset + 2]) << 16) |
         (static_cast<std::uint32_t>(bytes[offset + 3]) << 24);
}

}  // namespace

std::size_t TensorData::element_count() const noexcept {
  if (dims.empty()) return 0;
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

std::string encode_ptsr(const TensorData& tensor) {
  if (tensor.dims.empty() || tensor.dims.size() > 255) {
    throw FormatError("rank", "PTSR rank must be in [1, 255]");
  }
  if (tensor.values.size() != tensor.element_count()) {
    throw ShapeError("PTSR encode: value count does not match dims");
  }
  std::string out;
  out.reserve(kHeaderSize + 4 * tensor.dims.size() + 4 * tensor.values.size());
  out.append(kMagic, 4);
  out.push_back(static_cast<char>(kPtsrVersion));
  out.push_back(static_cast<char>(kPtsrFloat32));
  out.push_back(static_cast<char>(tensor.dims.size()));
  for (auto d : tensor.dims) put_u32(out, d);
  for (float v : tensor.values) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

TensorData decode_ptsr(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) throw FormatError("magic", "PTSR truncated before magic");
  for (std::size_t i = 0; i < 4; ++i) {
    if (bytes[i] != static_cast<std::uint8_t>(kMagic[i])) {
      throw FormatError("magic", "bad magic");
    }
  }
  if (bytes.size() < kHeaderSize) throw FormatError("rank", "PTSR truncated header");
  if (bytes[4] != kPtsrVersion) {
    throw FormatError("version", "unsupported version " + std::to_string(bytes[4]));
  }
  if (bytes[5] != kPtsrFloat32) {
    throw FormatError("dtype", "unsupported dtype code " + std::to_string(bytes[5]));
  }
  const std::size_t rank = bytes[6];
  if (rank == 0) throw FormatError("rank", "rank must be at least 1");
  if (bytes.size() < kHeaderSize + 4 * rank) {
    throw FormatError("dims", "PTSR truncated inside dims");
  }

  TensorData tensor;
  tensor.dims.reserve(rank);
  std::size_t count = 1;
  for (std::size_t i = 0; i < rank; ++i) {
    const auto d = get_u32(bytes, kHeaderSize + 4 * i);
    if (d == 0) throw FormatError("dims", "dimension " + std::to_string(i) + " is zero");
    tensor.dims.push_back(d);
    count *= d;
  }

  const std::size_t payload_offset = kHeaderSize + 4 * rank;
  const std::size_t expected = payload_offset + 4 * count;
  if (bytes.size() < expected) {
    std::ostringstream msg;
    msg << "truncated payload: expected " << 4 * count << " bytes, found "
        << bytes.size() - payload_offset;
    throw FormatError("payload", msg.str());
  }
  if (bytes.size() > expected) {
    throw FormatError("payload", "trailing bytes after payload");
  }
  tensor.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    tensor.values[i] = std::bit_cast<float>(get_u32(bytes, payload_offset + 4 * i));
  }
  return tensor;
}

TensorData decode_ptsr(const std::string& bytes) {
  return decode_ptsr(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
}

TensorData to_tensor_data(const Canvas& canvas) {
  if (canvas.empty()) throw DimensionError("cannot serialize an empty canvas");
  TensorData tensor;
  tensor.dims = {static_cast<std::uint32_t>(canvas.height()),
                 static_cast<std::uint32_t>(canvas.width()),
                 static_cast<std::uint32_t>(canvas.channels())};
  tensor.values.assign(canvas.data().begin(), canvas.data().end());
  return tensor;
}

Canvas to_canvas(const TensorData& tensor) {
  if (tensor.dims.size() != 3) {
    throw FormatError("rank", "expected a rank-3 tensor, got rank " +
                                  std::to_string(tensor.dims.size()));
  }
  return Canvas(tensor.dims[0], tensor.dims[1], tensor.dims[2], tensor.values);
}

void write_tensor_data(const TensorData& tensor, const std::filesystem::path& path) {
  const std::string bytes = encode_ptsr(tensor);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

TensorData read_tensor_data(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_ptsr(bytes);
}

void write_tensor(const Canvas& canvas, const std::filesystem::path& path) {
  write_tensor_data(to_tensor_data(canvas), path);
}

Canvas read_tensor(const std::filesystem::path& path) {
  return to_canvas(read_tensor_data(path));
}

}  // namespace panostitch
