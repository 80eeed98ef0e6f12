#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "panostitch/denoiser.hpp"
#include "panostitch/sampler.hpp"

namespace panostitch {

nlohmann::json config_to_json(const SamplerConfig& config);
// Missing keys keep the defaults of `base`; ConfigError on bad values.
SamplerConfig config_from_json(const nlohmann::json& j, SamplerConfig base = {});

struct RunManifest {
  SamplerConfig config;
  std::string backend;
  Conditioning conditioning;
  std::vector<double> step_seconds;
  std::map<std::string, std::string> outputs;  // role -> path
};

nlohmann::json to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const nlohmann::json& j);

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path);
RunManifest read_manifest(const std::filesystem::path& path);

}  // namespace panostitch
