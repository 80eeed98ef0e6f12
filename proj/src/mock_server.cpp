#include "panostitch/mock_server.hpp"

#include <functional>

#include "httplib.h"

#include "panostitch/error.hpp"
#include "panostitch/wire.hpp"

namespace panostitch {
namespace {

void reply_json(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& message) {
  reply_json(res, status, nlohmann::json{{"error", message}});
}

}  // namespace

std::vector<float> grid_embedding(const Canvas& image) {
  constexpr std::size_t kGrid = 4;
  std::vector<float> out(kGrid * kGrid * image.channels(), 0.0f);
  for (std::size_t gy = 0; gy < kGrid; ++gy) {
    const std::size_t y0 = gy * image.height() / kGrid;
    const std::size_t y1 = std::max(y0 + 1, (gy + 1) * image.height() / kGrid);
    for (std::size_t gx = 0; gx < kGrid; ++gx) {
      const std::size_t x0 = gx * image.width() / kGrid;
      const std::size_t x1 = std::max(x0 + 1, (gx + 1) * image.width() / kGrid);
      for (std::size_t c = 0; c < image.channels(); ++c) {
        double sum = 0.0;
        std::size_t n = 0;
        for (std::size_t y = y0; y < std::min(y1, image.height()); ++y) {
          for (std::size_t x = x0; x < std::min(x1, image.width()); ++x) {
            sum += image.at(y, x, c);
            ++n;
          }
        }
        out[(gy * kGrid + gx) * image.channels() + c] =
            n == 0 ? 0.0f : static_cast<float>(sum / static_cast<double>(n));
      }
    }
  }
  return out;
}

void mount_wire_routes(httplib::Server& server, std::shared_ptr<const DenoiserHandle> denoiser,
                       int latent_channels, std::string model_name) {
  server.Get("/health", [latent_channels, model_name](const httplib::Request&,
                                                      httplib::Response& res) {
    reply_json(res, 200,
               nlohmann::json{{"model", model_name}, {"latent_channels", latent_channels}});
  });

  server.Post("/denoise", [denoiser](const httplib::Request& req, httplib::Response& res) {
    DenoiseRequest request;
    try {
      request = wire::parse_denoise_request(nlohmann::json::parse(req.body));
    } catch (const std::exception& e) {
      reply_error(res, 400, e.what());
      return;
    }
    try {
      const Canvas out = denoiser->denoise(request);
      if (!out.all_finite()) {
        reply_error(res, 500, "denoiser produced non-finite values");
        return;
      }
      reply_json(res, 200, wire::denoise_response_body(out));
    } catch (const std::exception& e) {
      reply_error(res, 500, e.what());
    }
  });

  server.Post("/embed_text", [](const httplib::Request& req, httplib::Response& res) {
    try {
      const auto body = nlohmann::json::parse(req.body);
      const auto prompt = body.at("prompt").get<std::string>();
      reply_json(res, 200,
                 nlohmann::json{{"embedding_id",
                                 "text-" + std::to_string(std::hash<std::string>{}(prompt))}});
    } catch (const std::exception& e) {
      reply_error(res, 400, std::string("field 'prompt': ") + e.what());
    }
  });

  server.Post("/embed_image", [](const httplib::Request& req, httplib::Response& res) {
    Canvas image;
    try {
      const auto body = nlohmann::json::parse(req.body);
      image = to_canvas(wire::decode_tensor(body.at("tensor").get<std::string>()));
    } catch (const std::exception& e) {
      reply_error(res, 400, std::string("field 'tensor': ") + e.what());
      return;
    }
    TensorData embedding;
    embedding.values = grid_embedding(image);
    embedding.dims = {static_cast<std::uint32_t>(embedding.values.size())};
    reply_json(res, 200, nlohmann::json{{"embedding", wire::encode_tensor(embedding)}});
  });
}

}  // namespace panostitch
