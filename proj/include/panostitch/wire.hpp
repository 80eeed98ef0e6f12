#pragma once

// JSON bodies of the denoiser HTTP protocol. Tensors travel as base64 of
// their PTSR encoding.
//
//   POST /denoise      {"tensor", "t", "total_steps", "prompt"?, "embedding_id"?, "seed"}
//                      -> {"tensor"}
//   POST /embed_text   {"prompt"} -> {"embedding_id"}
//   POST /embed_image  {"tensor"} -> {"embedding": rank-1 tensor}
//   GET  /health       -> {"model", "latent_channels"}

#include <string>

#include "json.hpp"

#include "panostitch/denoiser.hpp"
#include "panostitch/tensor_io.hpp"

namespace panostitch::wire {

std::string base64_encode(const std::string& bytes);
// ProtocolError on malformed input.
std::string base64_decode(const std::string& text);

std::string encode_tensor(const TensorData& tensor);
// ProtocolError on bad base64; FormatError on a bad PTSR payload.
TensorData decode_tensor(const std::string& text);

nlohmann::json denoise_request_body(const DenoiseRequest& request);
// Server side: ProtocolError naming the missing/invalid field.
DenoiseRequest parse_denoise_request(const nlohmann::json& body);

nlohmann::json denoise_response_body(const Canvas& patch);
// Client side: checks shape against the request and rejects NaN/Inf with
// DataError.
Canvas parse_denoise_response(const nlohmann::json& body, const Canvas& request_patch);

struct Health {
  std::string model;
  int latent_channels = 0;
};
Health parse_health(const nlohmann::json& body);

}  // namespace panostitch::wire
