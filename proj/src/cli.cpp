#include "panostitch/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "panostitch/captions.hpp"
#include "panostitch/error.hpp"
#include "panostitch/evalkit.hpp"
#include "panostitch/image_io.hpp"
#include "panostitch/manifest.hpp"
#include "panostitch/mock_server.hpp"
#include "panostitch/remote_backend.hpp"
#include "panostitch/sampler.hpp"
#include "panostitch/tensor_io.hpp"

// After Eigen: <resolv.h> defines _res.
#include "CLI11.hpp"
#include "httplib.h"
#include "json.hpp"

namespace panostitch::cli {
namespace {

namespace fs = std::filesystem;

// Flags that configure a generation run; shared by generate and ablate.
struct GenerateFlags {
  std::string prompt = "360-degree panoramic image";
  std::size_t height = 64;
  std::size_t window_width = 128;
  std::size_t canvas_width = 0;  // 0: 2H + W
  std::size_t stride = 16;
  std::size_t channels = 4;
  int steps = 50;
  std::uint64_t seed = 0;
  std::string mode = "stitch";
  std::size_t stitch_passes = 2;
  std::string stitch_order = "pre";
  std::string concat_order = "rightmost-first";
  bool periodic_init = true;
  bool enforce_periodicity = false;
  std::string backend = "mock:identity";
  std::string out = "out";
  std::size_t max_inflight = 4;
  bool pixel_space = false;
  double timeout = 120.0;
  int retries = 2;
  bool png = false;
  float png_lo = -1.0f;
  float png_hi = 1.0f;
  std::size_t stride_override = 0;  // ablation sweep value, already in canvas cells
};

void add_generate_flags(CLI::App& app, GenerateFlags& f) {
  app.add_option("--prompt", f.prompt, "Text prompt");
  app.add_option("--height", f.height, "Panorama height H (cells)");
  app.add_option("--window-width", f.window_width, "Window width W (cells)");
  app.add_option("--canvas-width", f.canvas_width, "Extended canvas width W' (default 2H+W)");
  app.add_option("--stride", f.stride, "Horizontal window stride");
  app.add_option("--channels", f.channels, "Latent channels C");
  app.add_option("--steps", f.steps, "Denoising steps T");
  app.add_option("--seed", f.seed, "Run seed");
  app.add_option("--mode", f.mode, "multi | stitch");
  app.add_option("--stitch-passes", f.stitch_passes, "Stitch-block passes per step (K)");
  app.add_option("--stitch-order", f.stitch_order, "pre | post");
  app.add_option("--concat-order", f.concat_order, "rightmost-first | leftmost-first");
  app.add_option("--periodic-init", f.periodic_init, "Start from 2H-periodic noise");
  app.add_option("--enforce-periodicity", f.enforce_periodicity,
                 "Average columns c and c+2H after every step");
  app.add_option("--backend", f.backend, "Backend URL or mock:NAME");
  app.add_option("--out", f.out, "Output directory");
  app.add_option("--max-inflight", f.max_inflight, "Concurrent denoise requests");
  app.add_flag("--pixel-space", f.pixel_space, "Scale H, W and stride by 8");
  app.add_option("--timeout", f.timeout, "Backend request timeout (s)");
  app.add_option("--retries", f.retries, "Backend retry count");
  app.add_flag("--png", f.png, "Also export Jsyn.png (1 or 3 channels only)");
  app.add_option("--png-lo", f.png_lo, "Value mapped to black");
  app.add_option("--png-hi", f.png_hi, "Value mapped to white");
}

SamplerConfig to_sampler_config(const GenerateFlags& f) {
  SamplerConfig c;
  const std::size_t scale = f.pixel_space ? 8 : 1;
  c.height = f.height * scale;
  c.window_width = f.window_width * scale;
  c.stride = f.stride_override != 0 ? f.stride_override : f.stride * scale;
  c.canvas_width = f.canvas_width != 0 ? f.canvas_width * scale
                                       : 2 * c.height + c.window_width;
  c.channels = f.channels;
  c.steps = f.steps;
  c.seed = f.seed;
  c.mode = parse_mode(f.mode);
  c.stitch_passes = f.stitch_passes;
  c.stitch_timing = parse_timing(f.stitch_order);
  c.concat_order = parse_concat_order(f.concat_order);
  c.periodic_init = f.periodic_init;
  c.enforce_periodicity = f.enforce_periodicity;
  c.max_inflight = f.max_inflight;
  c.validate();
  return c;
}

BackendConfig remote_defaults(const GenerateFlags& f) {
  BackendConfig b;
  b.timeout_seconds = f.timeout;
  b.retries = f.retries;
  b.max_inflight = f.max_inflight;
  return b;
}

struct GenerateOutcome {
  RunResult result;
  fs::path dir;
};

GenerateOutcome generate_into(const GenerateFlags& f, const fs::path& dir, std::ostream& out) {
  const SamplerConfig config = to_sampler_config(f);
  const auto backend = make_backend(f.backend, config.steps, remote_defaults(f));
  Conditioning conditioning{f.prompt, std::nullopt};
  if (const auto* remote = dynamic_cast<const RemoteDenoiser*>(backend.get())) {
    conditioning.embedding_id = remote->embed_text(f.prompt);
  }

  fs::create_directories(dir);
  RunResult result = run(config, *backend, conditioning);

  RunManifest manifest{config, backend->id(), conditioning, result.step_seconds, {}};
  write_tensor(result.j0, dir / "J0.ptsr");
  write_tensor(result.jsyn, dir / "Jsyn.ptsr");
  manifest.outputs["J0"] = (dir / "J0.ptsr").string();
  manifest.outputs["Jsyn"] = (dir / "Jsyn.ptsr").string();
  if (f.png) {
    export_image(result.jsyn, dir / "Jsyn.png", ValueRange{f.png_lo, f.png_hi});
    manifest.outputs["Jsyn_png"] = (dir / "Jsyn.png").string();
  }
  write_manifest(manifest, dir / "manifest.json");
  out << "wrote " << (dir / "Jsyn.ptsr").string() << " (" << result.jsyn.height() << "x"
      << result.jsyn.width() << "x" << result.jsyn.channels() << ")\n";
  return {std::move(result), dir};
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Turns a JSON config file into leading "--key value" arguments so explicit
// flags, which come later, take precedence.
std::vector<std::string> config_file_args(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file " + path + " is not JSON: " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  // A run manifest: keep the sampler settings, backend and prompt.
  if (j.contains("config") && j["config"].is_object()) {
    nlohmann::json flat = j["config"];
    if (j.contains("backend")) flat["backend"] = j["backend"];
    if (j.contains("conditioning") && j["conditioning"].contains("prompt")) {
      flat["prompt"] = j["conditioning"]["prompt"];
    }
    j = std::move(flat);
  }
  std::vector<std::string> args;
  for (const auto& [key, value] : j.items()) {
    std::string name = "--" + key;
    std::replace(name.begin(), name.end(), '_', '-');
    if (value.is_boolean()) {
      // --pixel-space and --png are flags; the rest take true/false.
      if (key == "pixel_space" || key == "pixel-space" || key == "png") {
        if (value.get<bool>()) args.push_back(name);
        continue;
      }
      args.push_back(name);
      args.push_back(value.get<bool>() ? "true" : "false");
    } else if (value.is_string()) {
      args.push_back(name);
      args.push_back(value.get<std::string>());
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& v : value) {
        if (!joined.empty()) joined += ",";
        joined += v.is_string() ? v.get<std::string>() : v.dump();
      }
      args.push_back(name);
      args.push_back(joined);
    } else {
      args.push_back(name);
      args.push_back(value.dump());
    }
  }
  return args;
}

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  if (args.empty()) return args;
  std::vector<std::string> rest;
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (config_path.empty()) return rest;
  // Subcommand name(s) stay in front; config-derived flags follow, then the
  // user's flags.
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < rest.size() && rest[i].rfind("-", 0) != 0) out.push_back(rest[i++]);
  for (auto& a : config_file_args(config_path)) out.push_back(std::move(a));
  for (; i < rest.size(); ++i) out.push_back(rest[i]);
  return out;
}

eval::EmbeddingSet load_embeddings(const std::string& path) {
  return eval::EmbeddingSet::from_tensor(read_tensor_data(path));
}

std::vector<Canvas> load_canvases(const std::vector<std::string>& paths) {
  std::vector<Canvas> out;
  for (const auto& p : paths) out.push_back(read_tensor(p));
  return out;
}

void print_seam(std::ostream& out, const eval::SeamStats& s) {
  out << std::setprecision(10) << "seam_ratio " << s.ratio << "\nwrap " << s.wrap
      << "\ninterior " << s.interior << "\n";
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tiled 360-degree panorama sampling, evaluation and caption tooling",
               "panostitch"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  // generate
  GenerateFlags gen_flags;
  auto* generate = app.add_subcommand("generate", "Run the sampler and write J0, Jsyn, manifest");
  add_generate_flags(*generate, gen_flags);

  // ablate
  GenerateFlags abl_flags;
  std::string abl_param;
  std::string abl_values;
  auto* ablate = app.add_subcommand("ablate", "Sweep one parameter and report seam metrics");
  add_generate_flags(*ablate, abl_flags);
  ablate->add_option("--param", abl_param, "stride | stitch-passes | stitch-order | trigger-word")
      ->required();
  ablate->add_option("--values", abl_values, "Comma-separated values")->required();

  // eval
  auto* evalcmd = app.add_subcommand("eval", "Evaluation metrics");
  evalcmd->require_subcommand(1);
  std::string gen_path, real_path, seam_path;
  auto* clip = evalcmd->add_subcommand("clip-score", "Mean paired cosine similarity");
  clip->add_option("--gen", gen_path)->required();
  clip->add_option("--real", real_path)->required();
  auto* fidcmd = evalcmd->add_subcommand("fid", "Frechet distance between embedding sets");
  fidcmd->add_option("--gen", gen_path)->required();
  fidcmd->add_option("--real", real_path)->required();
  auto* seam = evalcmd->add_subcommand("seam", "Wrap-seam discontinuity of a panorama");
  seam->add_option("--in", seam_path)->required();

  std::string crop_images, crop_locations_out, crop_locations_in, crop_patch_dir;
  std::size_t crop_count = 1000, crop_size = 512;
  std::uint64_t crop_seed = 0;
  auto* crop = evalcmd->add_subcommand("crop", "Sample (or reuse) patch locations and crop");
  crop->add_option("--images", crop_images, "Comma-separated PTSR images")->required();
  crop->add_option("--count", crop_count);
  crop->add_option("--size", crop_size);
  crop->add_option("--seed", crop_seed);
  crop->add_option("--locations-out", crop_locations_out, "Write sampled locations here");
  crop->add_option("--locations", crop_locations_in, "Reuse recorded locations");
  crop->add_option("--patch-dir", crop_patch_dir, "Write each patch as PTSR");

  std::string embed_backend, embed_images, embed_locations, embed_out;
  double embed_timeout = 120.0;
  auto* embed = evalcmd->add_subcommand("embed", "Embed recorded-location patches via a backend");
  embed->add_option("--backend", embed_backend)->required();
  embed->add_option("--images", embed_images)->required();
  embed->add_option("--locations", embed_locations)->required();
  embed->add_option("--out", embed_out)->required();
  embed->add_option("--timeout", embed_timeout);

  std::string report_gen, report_real, report_panos, report_source = "unspecified",
                                                     report_out;
  auto* report = evalcmd->add_subcommand("report", "Mean and std of metrics over repeats");
  report->add_option("--gen", report_gen, "Comma-separated embedding files, one per repeat")
      ->required();
  report->add_option("--real", report_real)->required();
  report->add_option("--panoramas", report_panos, "Comma-separated Jsyn files for seam ratio");
  report->add_option("--source", report_source, "Embedding model tag recorded in the report");
  report->add_option("--out", report_out);

  // prep-captions
  std::string cap_in, cap_out, cap_blocklist, cap_trigger;
  auto* prep = app.add_subcommand("prep-captions", "Clean captions and prepend the trigger word");
  prep->add_option("--in", cap_in)->required();
  prep->add_option("--out", cap_out)->required();
  prep->add_option("--blocklist", cap_blocklist, "Comma-separated tags to remove");
  prep->add_option("--trigger", cap_trigger, "Trigger phrase");

  // inspect
  std::string inspect_path;
  auto* inspect = app.add_subcommand("inspect", "Print shape and statistics of a PTSR file");
  inspect->add_option("file", inspect_path)->required();

  // serve-mock
  std::string serve_backend = "mock:identity";
  int serve_port = 8765, serve_steps = 50, serve_channels = 4;
  std::string serve_host = "127.0.0.1";
  auto* serve = app.add_subcommand("serve-mock", "Serve the wire protocol from a mock backend");
  serve->add_option("--backend", serve_backend);
  serve->add_option("--host", serve_host);
  serve->add_option("--port", serve_port);
  serve->add_option("--steps", serve_steps);
  serve->add_option("--channels", serve_channels);

  std::vector<std::string> args;
  try {
    args = expand_config(raw_args);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*generate) {
      generate_into(gen_flags, gen_flags.out, out);
      return kExitOk;
    }

    if (*ablate) {
      const auto values = split_csv(abl_values);
      if (values.empty()) throw ConfigError("--values is empty");
      nlohmann::json rows = nlohmann::json::array();
      out << std::left << std::setw(16) << "value" << std::setw(14) << "seam_ratio"
          << std::setw(14) << "jump_peak" << "\n";
      for (const auto& value : values) {
        GenerateFlags f = abl_flags;
        if (abl_param == "stride") {
          f.stride_override = std::stoul(value);
        } else if (abl_param == "stitch-passes") {
          f.stitch_passes = std::stoul(value);
        } else if (abl_param == "stitch-order") {
          f.stitch_order = value;
        } else if (abl_param == "trigger-word") {
          if (value == "on") {
            f.prompt = prepare_caption(f.prompt);
          } else if (value != "off") {
            throw ConfigError("trigger-word values are on/off");
          }
        } else {
          throw ConfigError("unknown ablation parameter '" + abl_param + "'");
        }
        const auto outcome = generate_into(f, fs::path(f.out) / (abl_param + "-" + value), out);
        const auto stats = eval::seam_discontinuity(outcome.result.jsyn);
        const double peak = eval::column_jump_peak(outcome.result.jsyn);
        rows.push_back({{"value", value},
                        {"seam_ratio", stats.ratio},
                        {"seam_wrap", stats.wrap},
                        {"seam_interior", stats.interior},
                        {"jump_peak", peak},
                        {"dir", outcome.dir.string()}});
        out << std::left << std::setw(16) << value << std::setw(14) << stats.ratio
            << std::setw(14) << peak << "\n";
      }
      const nlohmann::json summary{{"param", abl_param}, {"results", rows}};
      std::ofstream(fs::path(abl_flags.out) / "ablation.json") << summary.dump(2) << "\n";
      return kExitOk;
    }

    if (*clip) {
      out << std::setprecision(10) << "clip_score "
          << eval::clip_score(load_embeddings(gen_path), load_embeddings(real_path)) << "\n";
      return kExitOk;
    }
    if (*fidcmd) {
      out << std::setprecision(10) << "fid "
          << eval::fid(load_embeddings(gen_path), load_embeddings(real_path)) << "\n";
      return kExitOk;
    }
    if (*seam) {
      print_seam(out, eval::seam_discontinuity(read_tensor(seam_path)));
      return kExitOk;
    }

    if (*crop) {
      const auto images = load_canvases(split_csv(crop_images));
      std::vector<eval::PatchLocation> locations;
      if (!crop_locations_in.empty()) {
        locations = eval::read_locations(crop_locations_in);
      } else {
        std::vector<eval::ImageDims> dims;
        for (const auto& im : images) dims.push_back({im.height(), im.width()});
        Rng rng(crop_seed);
        locations = eval::sample_locations(dims, crop_count, crop_size, rng);
      }
      const auto patches = eval::crop_patches(images, locations);
      if (!crop_locations_out.empty()) eval::write_locations(locations, crop_locations_out);
      if (!crop_patch_dir.empty()) {
        fs::create_directories(crop_patch_dir);
        for (std::size_t i = 0; i < patches.size(); ++i) {
          std::ostringstream name;
          name << "patch_" << std::setw(5) << std::setfill('0') << i << ".ptsr";
          write_tensor(patches[i], fs::path(crop_patch_dir) / name.str());
        }
      }
      out << "cropped " << patches.size() << " patches\n";
      return kExitOk;
    }

    if (*embed) {
      BackendConfig config;
      config.endpoint = embed_backend;
      config.timeout_seconds = embed_timeout;
      const RemoteDenoiser client(config);
      const auto images = load_canvases(split_csv(embed_images));
      const auto locations = eval::read_locations(embed_locations);
      std::vector<std::vector<float>> rows;
      for (const auto& patch : eval::crop_patches(images, locations)) {
        rows.push_back(client.embed_image(patch));
      }
      write_tensor_data(eval::EmbeddingSet::from_rows(rows).to_tensor(), embed_out);
      out << "embedded " << rows.size() << " patches\n";
      return kExitOk;
    }

    if (*report) {
      std::vector<eval::EmbeddingSet> gens;
      for (const auto& p : split_csv(report_gen)) gens.push_back(load_embeddings(p));
      std::vector<double> seams;
      for (const auto& p : split_csv(report_panos)) {
        seams.push_back(eval::seam_discontinuity(read_tensor(p)).ratio);
      }
      const auto rep = eval::build_report(gens, load_embeddings(report_real), seams, report_source);
      const auto text = eval::to_json(rep).dump(2);
      if (!report_out.empty()) std::ofstream(report_out) << text << "\n";
      out << text << "\n";
      return kExitOk;
    }

    if (*prep) {
      CaptionRule rule;
      if (!cap_blocklist.empty()) rule.blocklist = split_csv(cap_blocklist);
      if (!cap_trigger.empty()) rule.trigger = cap_trigger;
      std::ifstream in(cap_in);
      if (!in) throw IoError("cannot open " + cap_in);
      std::ofstream dst(cap_out);
      if (!dst) throw IoError("cannot open " + cap_out + " for writing");
      std::string line;
      std::size_t n = 0;
      while (std::getline(in, line)) {
        dst << prepare_caption(line, rule) << "\n";
        ++n;
      }
      out << "prepared " << n << " captions\n";
      return kExitOk;
    }

    if (*inspect) {
      const auto tensor = read_tensor_data(inspect_path);
      out << "dims";
      for (auto d : tensor.dims) out << " " << d;
      double lo = tensor.values.front(), hi = lo, sum = 0.0;
      for (float v : tensor.values) {
        lo = std::min<double>(lo, v);
        hi = std::max<double>(hi, v);
        sum += v;
      }
      out << std::setprecision(8) << "\nmin " << lo << "\nmax " << hi << "\nmean "
          << sum / static_cast<double>(tensor.values.size()) << "\n";
      return kExitOk;
    }

    if (*serve) {
      httplib::Server server;
      mount_wire_routes(server, make_backend(serve_backend, serve_steps), serve_channels,
                        serve_backend);
      out << "serving " << serve_backend << " on " << serve_host << ":" << serve_port
          << std::endl;
      if (!server.listen(serve_host, serve_port)) {
        throw IoError("cannot listen on " + serve_host + ":" + std::to_string(serve_port));
      }
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: bad value: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace panostitch::cli
