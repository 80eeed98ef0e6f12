#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>

#include "panostitch/canvas.hpp"

namespace panostitch {

// Seeded generator with a frozen algorithm: std::mt19937_64 (bit-exact by the
// C++ standard) for raw bits, and the classic two-output Box-Muller transform
// evaluated in double precision for normals. std::normal_distribution is not
// used because its algorithm is implementation-defined.
class Rng {
 public:
  static constexpr const char* kAlgorithm = "mt19937_64+box-muller";

  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }
  // Uniform in (0, 1], 53 bits of resolution.
  double uniform_open0();
  // Uniform integer in [0, bound). bound must be > 0. Rejection sampling, so
  // the stream is portable (unlike std::uniform_int_distribution).
  std::uint64_t below(std::uint64_t bound);
  double normal();

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

// splitmix64 finalizer; used to derive independent per-request seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b,
                          std::uint64_t c = 0) noexcept;

// i.i.d. standard normal entries in row-major order. DimensionError on a zero
// dimension.
Canvas gaussian_fill(std::size_t height, std::size_t width, std::size_t channels, Rng& rng);

}  // namespace panostitch
