#include "panostitch/manifest.hpp"

#include <fstream>

#include "panostitch/error.hpp"
#include "panostitch/rng.hpp"

namespace panostitch {

nlohmann::json config_to_json(const SamplerConfig& c) {
  return nlohmann::json{{"height", c.height},
                        {"window_width", c.window_width},
                        {"canvas_width", c.canvas_width},
                        {"stride", c.stride},
                        {"channels", c.channels},
                        {"steps", c.steps},
                        {"seed", c.seed},
                        {"mode", to_string(c.mode)},
                        {"stitch_passes", c.stitch_passes},
                        {"concat_order", to_string(c.concat_order)},
                        {"stitch_order", to_string(c.stitch_timing)},
                        {"periodic_init", c.periodic_init},
                        {"enforce_periodicity", c.enforce_periodicity},
                        {"max_inflight", c.max_inflight}};
}

SamplerConfig config_from_json(const nlohmann::json& j, SamplerConfig c) {
  if (!j.is_object()) throw ConfigError("sampler config must be a JSON object");
  try {
    if (j.contains("height")) j.at("height").get_to(c.height);
    if (j.contains("window_width")) j.at("window_width").get_to(c.window_width);
    if (j.contains("canvas_width")) j.at("canvas_width").get_to(c.canvas_width);
    if (j.contains("stride")) j.at("stride").get_to(c.stride);
    if (j.contains("channels")) j.at("channels").get_to(c.channels);
    if (j.contains("steps")) j.at("steps").get_to(c.steps);
    if (j.contains("seed")) j.at("seed").get_to(c.seed);
    if (j.contains("mode")) c.mode = parse_mode(j.at("mode").get<std::string>());
    if (j.contains("stitch_passes")) j.at("stitch_passes").get_to(c.stitch_passes);
    if (j.contains("concat_order")) {
      c.concat_order = parse_concat_order(j.at("concat_order").get<std::string>());
    }
    if (j.contains("stitch_order")) {
      c.stitch_timing = parse_timing(j.at("stitch_order").get<std::string>());
    }
    if (j.contains("periodic_init")) j.at("periodic_init").get_to(c.periodic_init);
    if (j.contains("enforce_periodicity")) {
      j.at("enforce_periodicity").get_to(c.enforce_periodicity);
    }
    if (j.contains("max_inflight")) j.at("max_inflight").get_to(c.max_inflight);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad sampler config: ") + e.what());
  }
  return c;
}

nlohmann::json to_json(const RunManifest& m) {
  nlohmann::json cond{{"prompt", m.conditioning.prompt}};
  if (m.conditioning.embedding_id) cond["embedding_id"] = *m.conditioning.embedding_id;
  return nlohmann::json{{"config", config_to_json(m.config)},
                        {"seed", m.config.seed},
                        {"rng", Rng::kAlgorithm},
                        {"backend", m.backend},
                        {"conditioning", cond},
                        {"step_seconds", m.step_seconds},
                        {"outputs", m.outputs}};
}

RunManifest manifest_from_json(const nlohmann::json& j) {
  RunManifest m;
  try {
    m.config = config_from_json(j.at("config"));
    m.backend = j.at("backend").get<std::string>();
    const auto& cond = j.at("conditioning");
    m.conditioning.prompt = cond.value("prompt", "");
    if (cond.contains("embedding_id")) {
      m.conditioning.embedding_id = cond.at("embedding_id").get<std::string>();
    }
    m.step_seconds = j.value("step_seconds", std::vector<double>{});
    m.outputs = j.value("outputs", std::map<std::string, std::string>{});
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad manifest: ") + e.what());
  }
  return m;
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << to_json(manifest).dump(2) << "\n";
}

RunManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return manifest_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("manifest is not JSON: ") + e.what());
  }
}

}  // namespace panostitch
