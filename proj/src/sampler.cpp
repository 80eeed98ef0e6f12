#include "panostitch/sampler.hpp"

#include <chrono>
#include <exception>
#include <sstream>

#include "panostitch/error.hpp"

namespace panostitch {
namespace {

constexpr std::uint64_t kWindowStream = 1;
constexpr std::uint64_t kStitchStream = 2;

// Maps batch position -> (window | stitch pass) for error reporting.
struct BatchLayout {
  std::size_t stitch_passes = 0;

  std::optional<int> window(std::size_t index) const {
    if (index < stitch_passes) return std::nullopt;
    return static_cast<int>(index - stitch_passes);
  }
  std::optional<int> stitch_pass(std::size_t index) const {
    if (index < stitch_passes) return static_cast<int>(index);
    return std::nullopt;
  }
};

std::vector<Canvas> run_batch(const DenoiserHandle& denoiser,
                              const std::vector<DenoiseRequest>& requests, int t,
                              const StepOptions& options, BatchLayout layout) {
  std::vector<Canvas> outputs;
  try {
    outputs = denoiser.denoise_batch(requests, options.max_inflight);
  } catch (const DispatchFailure& failure) {
    std::ostringstream msg;
    msg << "step " << t << ", ";
    if (auto w = layout.window(failure.index())) {
      msg << "window " << *w;
    } else {
      msg << "stitch pass " << *layout.stitch_pass(failure.index());
    }
    msg << ": " << failure.what();
    throw BackendError(msg.str(), t, layout.window(failure.index()),
                       layout.stitch_pass(failure.index()));
  }
  if (outputs.size() != requests.size()) {
    throw ProtocolError("denoiser returned a batch of the wrong length");
  }
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    if (!outputs[i].same_shape(requests[i].patch) || !outputs[i].all_finite()) {
      std::ostringstream msg;
      msg << "step " << t << ": denoiser output " << i << " has wrong shape or non-finite values";
      throw BackendError(msg.str(), t, layout.window(i), layout.stitch_pass(i));
    }
  }
  return outputs;
}

DenoiseRequest make_request(Canvas patch, int t, const Conditioning& conditioning,
                            const StepOptions& options, std::uint64_t seed) {
  return DenoiseRequest{std::move(patch), t, options.total_steps, conditioning, seed};
}

void check_step_input(const Canvas& jt, const TilingPlan& tiling) {
  if (jt.width() != tiling.canvas_width) {
    std::ostringstream msg;
    msg << "canvas width " << jt.width() << " does not match plan width "
        << tiling.canvas_width;
    throw ShapeError(msg.str());
  }
}

}  // namespace

std::string to_string(SamplingMode mode) {
  return mode == SamplingMode::kMultiDiffusion ? "multidiffusion" : "stitchdiffusion";
}

std::string to_string(ConcatOrder order) {
  return order == ConcatOrder::kRightmostFirst ? "rightmost-first" : "leftmost-first";
}

std::string to_string(StitchTiming timing) {
  return timing == StitchTiming::kPre ? "pre" : "post";
}

SamplingMode parse_mode(const std::string& name) {
  if (name == "multi" || name == "multidiffusion") return SamplingMode::kMultiDiffusion;
  if (name == "stitch" || name == "stitchdiffusion") return SamplingMode::kStitchDiffusion;
  throw ConfigError("unknown mode '" + name + "' (expected multi or stitch)");
}

StitchTiming parse_timing(const std::string& name) {
  if (name == "pre") return StitchTiming::kPre;
  if (name == "post") return StitchTiming::kPost;
  throw ConfigError("unknown stitch order '" + name + "' (expected pre or post)");
}

ConcatOrder parse_concat_order(const std::string& name) {
  if (name == "rightmost-first") return ConcatOrder::kRightmostFirst;
  if (name == "leftmost-first") return ConcatOrder::kLeftmostFirst;
  throw ConfigError("unknown concat order '" + name + "'");
}

void SamplerConfig::validate() const {
  if (height == 0 || window_width == 0 || canvas_width == 0 || stride == 0 || channels == 0) {
    throw ConfigError("height, window width, canvas width, stride and channels must be positive");
  }
  if (steps < 1) throw ConfigError("steps must be at least 1");
  if (max_inflight < 1) throw ConfigError("max in-flight requests must be at least 1");
  if (window_width >= canvas_width) {
    throw ConfigError("canvas width must exceed window width so the global crop is non-empty");
  }
  if (window_width % 2 != 0) throw ConfigError("window width must be even");
  (void)tiling();
  if (mode == SamplingMode::kStitchDiffusion) {
    if (canvas_width != 2 * height + window_width) {
      std::ostringstream msg;
      msg << "stitch mode needs canvas width 2H + W = " << 2 * height + window_width << ", got "
          << canvas_width;
      throw ConfigError(msg.str());
    }
    if (stitch_passes < 1) throw ConfigError("stitch mode needs at least one stitch pass");
  }
}

TilingPlan SamplerConfig::tiling() const {
  return plan_windows(canvas_width, window_width, stride);
}

StitchPlan SamplerConfig::stitch() const {
  return make_stitch_plan(window_width, stitch_passes, concat_order, stitch_timing);
}

std::uint64_t window_seed(std::uint64_t run_seed, int t, std::size_t window) {
  return derive_seed(run_seed, static_cast<std::uint64_t>(t), kWindowStream, window);
}

std::uint64_t stitch_pass_seed(std::uint64_t run_seed, int t, std::size_t pass) {
  return derive_seed(run_seed, static_cast<std::uint64_t>(t), kStitchStream, pass);
}

Canvas init_canvas(const SamplerConfig& config) {
  config.validate();
  Rng rng(config.seed);
  Canvas canvas = gaussian_fill(config.height, config.canvas_width, config.channels, rng);
  if (config.periodic_init) {
    const std::size_t period = config.period();
    for (std::size_t y = 0; y < canvas.height(); ++y) {
      for (std::size_t x = period; x < canvas.width(); ++x) {
        for (std::size_t c = 0; c < canvas.channels(); ++c) {
          canvas.at(y, x, c) = canvas.at(y, x % period, c);
        }
      }
    }
  }
  return canvas;
}

Accumulator accumulate_step(const Canvas& jt, int t, const TilingPlan& tiling,
                            const StitchPlan* stitch, const DenoiserHandle& denoiser,
                            const Conditioning& conditioning, const StepOptions& options) {
  check_step_input(jt, tiling);
  const std::size_t passes = stitch != nullptr ? stitch->passes : 0;

  std::vector<DenoiseRequest> requests;
  std::vector<Region> regions;
  requests.reserve(passes + tiling.count());
  if (passes > 0) {
    const StitchRegion region{stitch->half, stitch->concat_order};
    const Canvas block = extract_region(jt, region);
    for (std::size_t j = 0; j < passes; ++j) {
      requests.push_back(
          make_request(block, t, conditioning, options, stitch_pass_seed(options.seed, t, j)));
      regions.emplace_back(region);
    }
  }
  for (std::size_t i = 0; i < tiling.count(); ++i) {
    const WindowRegion region{tiling.starts[i], tiling.window_width};
    requests.push_back(make_request(extract_region(jt, region), t, conditioning, options,
                                    window_seed(options.seed, t, i)));
    regions.emplace_back(region);
  }

  const auto outputs = run_batch(denoiser, requests, t, options, BatchLayout{passes});

  // Fixed reduction order: stitch pass 1..K, then window 1..n.
  Accumulator acc(jt.height(), jt.width(), jt.channels());
  for (std::size_t k = 0; k < outputs.size(); ++k) {
    scatter_accumulate(acc, regions[k], outputs[k], 1.0f);
  }
  return acc;
}

Canvas multidiffusion_step(const Canvas& jt, int t, const TilingPlan& tiling,
                           const DenoiserHandle& denoiser, const Conditioning& conditioning,
                           const StepOptions& options) {
  return accumulate_step(jt, t, tiling, nullptr, denoiser, conditioning, options).normalized();
}

Canvas stitchdiffusion_step(const Canvas& jt, int t, const TilingPlan& tiling,
                            const StitchPlan& stitch, const DenoiserHandle& denoiser,
                            const Conditioning& conditioning, const StepOptions& options) {
  if (stitch.timing == StitchTiming::kPre) {
    return accumulate_step(jt, t, tiling, &stitch, denoiser, conditioning, options)
        .normalized();
  }

  Canvas averaged = multidiffusion_step(jt, t, tiling, denoiser, conditioning, options);
  if (stitch.passes == 0) return averaged;

  const StitchRegion region{stitch.half, stitch.concat_order};
  const Canvas block = extract_region(averaged, region);
  std::vector<DenoiseRequest> requests;
  for (std::size_t j = 0; j < stitch.passes; ++j) {
    requests.push_back(
        make_request(block, t, conditioning, options, stitch_pass_seed(options.seed, t, j)));
  }
  const auto outputs = run_batch(denoiser, requests, t, options, BatchLayout{stitch.passes});

  Accumulator acc(averaged.height(), averaged.width(), averaged.channels());
  for (const auto& out : outputs) scatter_accumulate(acc, region, out, 1.0f);
  auto value = acc.value();
  auto weight = acc.weight();
  auto dst = averaged.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    if (weight[i] > 0.0) dst[i] = static_cast<float>(value[i] / weight[i]);
  }
  return averaged;
}

void enforce_periodic(Canvas& canvas, std::size_t period) {
  if (period == 0) throw ConfigError("period must be positive");
  if (period >= canvas.width()) return;
  std::vector<double> sums(period * canvas.channels());
  std::vector<std::size_t> counts(period);
  for (std::size_t x = 0; x < canvas.width(); ++x) ++counts[x % period];
  for (std::size_t y = 0; y < canvas.height(); ++y) {
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t x = 0; x < canvas.width(); ++x) {
      for (std::size_t c = 0; c < canvas.channels(); ++c) {
        sums[(x % period) * canvas.channels() + c] += canvas.at(y, x, c);
      }
    }
    for (std::size_t x = 0; x < canvas.width(); ++x) {
      const std::size_t p = x % period;
      for (std::size_t c = 0; c < canvas.channels(); ++c) {
        canvas.at(y, x, c) =
            static_cast<float>(sums[p * canvas.channels() + c] / static_cast<double>(counts[p]));
      }
    }
  }
}

RunResult run(const SamplerConfig& config, const DenoiserHandle& denoiser,
              const Conditioning& conditioning, const StepObserver& observer) {
  config.validate();
  if (!conditioning.valid()) throw ConfigError("conditioning needs a prompt or an embedding id");

  const TilingPlan tiling = config.tiling();
  const StitchPlan stitch = config.stitch();
  const StepOptions options{config.seed, config.steps, config.max_inflight};

  RunResult result;
  result.step_seconds.reserve(static_cast<std::size_t>(config.steps));
  Canvas current = init_canvas(config);
  for (int t = config.steps; t >= 1; --t) {
    const auto begin = std::chrono::steady_clock::now();
    current = config.mode == SamplingMode::kStitchDiffusion
                  ? stitchdiffusion_step(current, t, tiling, stitch, denoiser, conditioning,
                                         options)
                  : multidiffusion_step(current, t, tiling, denoiser, conditioning, options);
    if (config.enforce_periodicity) enforce_periodic(current, config.period());
    const auto end = std::chrono::steady_clock::now();
    result.step_seconds.push_back(std::chrono::duration<double>(end - begin).count());
    if (observer) observer(t, current);
  }
  result.jsyn = global_crop(current, config.window_width);
  result.j0 = std::move(current);
  return result;
}

}  // namespace panostitch
