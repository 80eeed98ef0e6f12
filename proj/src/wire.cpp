#include "panostitch/wire.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <sstream>

#include "panostitch/error.hpp"

namespace panostitch::wire {
namespace {

template <typename T>
T required(const nlohmann::json& body, const char* field) {
  if (!body.is_object() || !body.contains(field)) {
    throw ProtocolError(std::string("missing field '") + field + "'");
  }
  try {
    return body.at(field).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ProtocolError(std::string("invalid field '") + field + "'");
  }
}

}  // namespace

std::string base64_encode(const std::string& bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int written =
      EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                      reinterpret_cast<const unsigned char*>(bytes.data()),
                      static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(written));
  return out;
}

std::string base64_decode(const std::string& text) {
  if (text.size() % 4 != 0) throw ProtocolError("base64 length is not a multiple of 4");
  std::string out(3 * (text.size() / 4), '\0');
  const int written =
      EVP_DecodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                      reinterpret_cast<const unsigned char*>(text.data()),
                      static_cast<int>(text.size()));
  if (written < 0) throw ProtocolError("malformed base64");
  // EVP_DecodeBlock keeps the zero bytes produced by '=' padding.
  std::size_t padding = 0;
  if (!text.empty() && text.back() == '=') ++padding;
  if (text.size() > 1 && text[text.size() - 2] == '=') ++padding;
  out.resize(static_cast<std::size_t>(written) - padding);
  return out;
}

std::string encode_tensor(const TensorData& tensor) { return base64_encode(encode_ptsr(tensor)); }

TensorData decode_tensor(const std::string& text) { return decode_ptsr(base64_decode(text)); }

nlohmann::json denoise_request_body(const DenoiseRequest& request) {
  nlohmann::json body{{"tensor", encode_tensor(to_tensor_data(request.patch))},
                      {"t", request.t},
                      {"total_steps", request.total_steps},
                      {"seed", request.seed}};
  if (!request.conditioning.prompt.empty()) body["prompt"] = request.conditioning.prompt;
  if (request.conditioning.embedding_id) {
    body["embedding_id"] = *request.conditioning.embedding_id;
  }
  return body;
}

DenoiseRequest parse_denoise_request(const nlohmann::json& body) {
  DenoiseRequest request;
  try {
    request.patch = to_canvas(decode_tensor(required<std::string>(body, "tensor")));
  } catch (const FormatError& e) {
    throw ProtocolError(std::string("invalid field 'tensor': ") + e.what());
  }
  request.t = required<int>(body, "t");
  request.total_steps = required<int>(body, "total_steps");
  request.seed = required<std::uint64_t>(body, "seed");
  if (body.contains("prompt")) request.conditioning.prompt = required<std::string>(body, "prompt");
  if (body.contains("embedding_id")) {
    request.conditioning.embedding_id = required<std::string>(body, "embedding_id");
  }
  if (!request.conditioning.valid()) {
    throw ProtocolError("missing field 'prompt' (or 'embedding_id')");
  }
  return request;
}

nlohmann::json denoise_response_body(const Canvas& patch) {
  return nlohmann::json{{"tensor", encode_tensor(to_tensor_data(patch))}};
}

Canvas parse_denoise_response(const nlohmann::json& body, const Canvas& request_patch) {
  TensorData tensor;
  try {
    tensor = decode_tensor(required<std::string>(body, "tensor"));
  } catch (const FormatError& e) {
    throw ProtocolError(std::string("response tensor: ") + e.what());
  }
  const std::vector<std::uint32_t> expected{static_cast<std::uint32_t>(request_patch.height()),
                                            static_cast<std::uint32_t>(request_patch.width()),
                                            static_cast<std::uint32_t>(request_patch.channels())};
  if (tensor.dims != expected) {
    std::ostringstream msg;
    msg << "response shape mismatch: expected " << expected[0] << "x" << expected[1] << "x"
        << expected[2];
    throw ProtocolError(msg.str());
  }
  for (float v : tensor.values) {
    if (!std::isfinite(v)) throw DataError("backend returned non-finite values");
  }
  return to_canvas(tensor);
}

Health parse_health(const nlohmann::json& body) {
  return Health{required<std::string>(body, "model"), required<int>(body, "latent_channels")};
}

}  // namespace panostitch::wire
