#include "panostitch/remote_backend.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

#include "httplib.h"

#include "panostitch/error.hpp"
#include "panostitch/mock_backends.hpp"

namespace panostitch {
namespace {

bool retryable_status(int status) {
  return status == 429 || status == 502 || status == 503 || status == 504;
}

std::unique_ptr<httplib::Client> make_client(const BackendConfig& config) {
  auto client = std::make_unique<httplib::Client>(config.endpoint);
  const auto usec = static_cast<std::int64_t>(config.timeout_seconds * 1e6);
  const auto sec = static_cast<time_t>(usec / 1000000);
  const auto rem = static_cast<time_t>(usec % 1000000);
  client->set_connection_timeout(sec, rem);
  client->set_read_timeout(sec, rem);
  client->set_write_timeout(sec, rem);
  return client;
}

nlohmann::json parse_body(const std::string& path, const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception&) {
    throw ProtocolError(path + ": response is not JSON");
  }
}

}  // namespace

void BackendConfig::validate() const {
  if (endpoint.empty()) throw ConfigError("backend endpoint is empty");
  if (!(timeout_seconds > 0.0)) throw ConfigError("backend timeout must be positive");
  if (retries < 0) throw ConfigError("backend retries must be >= 0");
  if (max_inflight < 1) throw ConfigError("backend max in-flight must be >= 1");
}

RemoteDenoiser::RemoteDenoiser(BackendConfig config) : config_(std::move(config)) {
  config_.validate();
  auto client = make_client(config_);
  auto res = client->Get("/health");
  if (!res) {
    throw TransportError("health check against " + config_.endpoint +
                         " failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw TransportError("health check against " + config_.endpoint + " returned " +
                         std::to_string(res->status));
  }
  health_ = wire::parse_health(parse_body("/health", res->body));
}

nlohmann::json RemoteDenoiser::post(const std::string& path, const nlohmann::json& body) const {
  const std::string payload = body.dump();
  std::string last_error;
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    auto client = make_client(config_);
    auto res = client->Post(path, payload, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status == 200) return parse_body(path, res->body);
    if (retryable_status(res->status)) {
      last_error = "HTTP " + std::to_string(res->status);
      std::this_thread::sleep_for(std::chrono::milliseconds(10 * (attempt + 1)));
      continue;
    }
    throw ProtocolError(path + " returned HTTP " + std::to_string(res->status) + ": " +
                        res->body.substr(0, 200));
  }
  throw TransportError(path + " failed after " + std::to_string(config_.retries + 1) +
                       " attempts: " + last_error);
}

Canvas RemoteDenoiser::denoise(const DenoiseRequest& request) const {
  const auto body = post("/denoise", wire::denoise_request_body(request));
  return wire::parse_denoise_response(body, request.patch);
}

std::vector<Canvas> RemoteDenoiser::denoise_batch(std::span<const DenoiseRequest> requests,
                                                  std::size_t max_inflight) const {
  return dispatch_parallel(*this, requests,
                           std::min(std::max<std::size_t>(max_inflight, 1), config_.max_inflight));
}

std::string RemoteDenoiser::id() const {
  return "remote:" + config_.endpoint + " model=" + health_.model;
}

std::string RemoteDenoiser::embed_text(const std::string& prompt) const {
  const auto body = post("/embed_text", nlohmann::json{{"prompt", prompt}});
  if (!body.contains("embedding_id") || !body["embedding_id"].is_string()) {
    throw ProtocolError("/embed_text: missing field 'embedding_id'");
  }
  return body["embedding_id"].get<std::string>();
}

std::vector<float> RemoteDenoiser::embed_image(const Canvas& image) const {
  const auto body =
      post("/embed_image", nlohmann::json{{"tensor", wire::encode_tensor(to_tensor_data(image))}});
  if (!body.contains("embedding") || !body["embedding"].is_string()) {
    throw ProtocolError("/embed_image: missing field 'embedding'");
  }
  TensorData tensor;
  try {
    tensor = wire::decode_tensor(body["embedding"].get<std::string>());
  } catch (const FormatError& e) {
    throw ProtocolError(std::string("/embed_image: ") + e.what());
  }
  if (tensor.dims.size() != 1) throw ProtocolError("/embed_image: embedding must be rank 1");
  for (float v : tensor.values) {
    if (!std::isfinite(v)) throw DataError("/embed_image: non-finite embedding");
  }
  return tensor.values;
}

std::shared_ptr<const DenoiserHandle> make_backend(const std::string& spec, int steps,
                                                   const BackendConfig& remote_defaults) {
  if (spec.rfind("http://", 0) == 0 || spec.rfind("https://", 0) == 0) {
    BackendConfig config = remote_defaults;
    config.endpoint = spec;
    return std::make_shared<RemoteDenoiser>(std::move(config));
  }
  if (spec.rfind("mock:", 0) != 0) {
    throw ConfigError("unknown backend '" + spec + "' (expected mock:NAME or a URL)");
  }
  const std::string rest = spec.substr(5);
  const auto colon = rest.find(':');
  const std::string name = rest.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : rest.substr(colon + 1);
  try {
    if (name == "identity" && arg.empty()) return mock_identity();
    if (name == "constant") return mock_constant(arg.empty() ? 0.0f : std::stof(arg));
    if (name == "blur") {
      const auto radius = arg.empty() ? 2ul : std::stoul(arg);
      return mock_blur(radius, MockSchedule::linear(steps));
    }
    if (name == "noise" && arg.empty()) return mock_seeded_noise(MockSchedule::linear(steps));
  } catch (const std::logic_error&) {
    throw ConfigError("bad argument in backend '" + spec + "'");
  }
  throw ConfigError("unknown mock backend '" + spec + "'");
}

}  // namespace panostitch
