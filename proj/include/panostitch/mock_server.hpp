#pragma once

#include <memory>
#include <string>

#include "panostitch/canvas.hpp"
#include "panostitch/denoiser.hpp"

namespace httplib {
class Server;
}

namespace panostitch {

// Mounts /health, /denoise, /embed_text and /embed_image on server, backed
// by an in-process denoiser. Lets the remote client and the CLI run end to
// end without a model.
void mount_wire_routes(httplib::Server& server, std::shared_ptr<const DenoiserHandle> denoiser,
                       int latent_channels, std::string model_name);

// Deterministic stand-in image embedding: per-channel means over a 4x4 grid
// of cells, 16 * channels values.
std::vector<float> grid_embedding(const Canvas& image);

}  // namespace panostitch
