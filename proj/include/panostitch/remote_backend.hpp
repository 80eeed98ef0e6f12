#pragma once

#include <memory>
#include <string>
#include <vector>

#include "panostitch/denoiser.hpp"
#include "panostitch/wire.hpp"

namespace panostitch {

struct BackendConfig {
  std::string endpoint;  // "http://host:port"
  double timeout_seconds = 120.0;
  std::size_t max_inflight = 4;
  int retries = 2;

  void validate() const;
};

// DenoiserHandle speaking the HTTP protocol in wire.hpp. Each call opens its
// own connection, so concurrent denoise() calls are safe.
class RemoteDenoiser final : public DenoiserHandle {
 public:
  // Runs GET /health; TransportError if the server is unreachable.
  explicit RemoteDenoiser(BackendConfig config);

  Canvas denoise(const DenoiseRequest& request) const override;
  // In flight: min(max_inflight argument, config.max_inflight).
  std::vector<Canvas> denoise_batch(std::span<const DenoiseRequest> requests,
                                    std::size_t max_inflight) const override;
  std::string id() const override;

  const wire::Health& health() const noexcept { return health_; }
  const BackendConfig& config() const noexcept { return config_; }

  std::string embed_text(const std::string& prompt) const;
  std::vector<float> embed_image(const Canvas& image) const;

 private:
  nlohmann::json post(const std::string& path, const nlohmann::json& body) const;

  BackendConfig config_;
  wire::Health health_;
};

// "mock:identity", "mock:constant:<c>", "mock:blur[:<r>]", "mock:noise", or
// an http(s) URL. Mocks get MockSchedule::linear(steps).
std::shared_ptr<const DenoiserHandle> make_backend(const std::string& spec, int steps,
                                                   const BackendConfig& remote_defaults = {});

}  // namespace panostitch
