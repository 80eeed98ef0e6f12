#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <exception>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "panostitch/canvas.hpp"

namespace panostitch {

// Text conditioning for the denoiser. Either the prompt itself or an id the
// backend handed out from /embed_text (or both).
struct Conditioning {
  std::string prompt;
  std::optional<std::string> embedding_id;

  bool valid() const noexcept { return !prompt.empty() || embedding_id.has_value(); }
};

// One per-step denoising call: patch at step t in, patch at step t-1 out.
struct DenoiseRequest {
  Canvas patch;
  int t = 0;
  int total_steps = 0;
  Conditioning conditioning;
  std::uint64_t seed = 0;
};

// Per-step denoiser. Implementations must return a canvas of the request's
// shape, be deterministic in (patch, t, conditioning, seed), and tolerate
// concurrent denoise() calls.
class DenoiserHandle {
 public:
  virtual ~DenoiserHandle() = default;

  virtual Canvas denoise(const DenoiseRequest& request) const = 0;

  // Results come back in request order whatever order they complete in.
  // The default runs up to max_inflight denoise() calls at a time on worker
  // threads. Failures surface as DispatchFailure.
  virtual std::vector<Canvas> denoise_batch(std::span<const DenoiseRequest> requests,
                                            std::size_t max_inflight) const;

  // Recorded in run manifests.
  virtual std::string id() const = 0;
};

// First failing request of a batch (lowest index). what() carries the
// original message.
class DispatchFailure : public std::runtime_error {
 public:
  DispatchFailure(std::size_t index, const std::string& what, std::exception_ptr cause)
      : std::runtime_error(what), index_(index), cause_(std::move(cause)) {}
  std::size_t index() const noexcept { return index_; }
  const std::exception_ptr& cause() const noexcept { return cause_; }

 private:
  std::size_t index_;
  std::exception_ptr cause_;
};

// Calls denoise() for every request with at most max_inflight in flight and
// stores each result at its request index. Also checks the shape contract.
std::vector<Canvas> dispatch_parallel(const DenoiserHandle& denoiser,
                                      std::span<const DenoiseRequest> requests,
                                      std::size_t max_inflight);

}  // namespace panostitch
