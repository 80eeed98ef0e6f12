#include "panostitch/denoiser.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "panostitch/error.hpp"

namespace panostitch {

std::vector<Canvas> DenoiserHandle::denoise_batch(std::span<const DenoiseRequest> requests,
                                                  std::size_t max_inflight) const {
  return dispatch_parallel(*this, requests, max_inflight);
}

std::vector<Canvas> dispatch_parallel(const DenoiserHandle& denoiser,
                                      std::span<const DenoiseRequest> requests,
                                      std::size_t max_inflight) {
  std::vector<Canvas> results(requests.size());
  std::vector<std::exception_ptr> errors(requests.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= requests.size() || failed.load()) return;
      try {
        Canvas out = denoiser.denoise(requests[i]);
        if (!out.same_shape(requests[i].patch)) {
          std::ostringstream msg;
          msg << "denoiser returned " << out.height() << "x" << out.width() << "x"
              << out.channels() << " for a " << requests[i].patch.height() << "x"
              << requests[i].patch.width() << "x" << requests[i].patch.channels()
              << " patch";
          throw ProtocolError(msg.str());
        }
        results[i] = std::move(out);
      } catch (...) {
        errors[i] = std::current_exception();
        failed.store(true);
      }
    }
  };

  const std::size_t threads =
      std::clamp<std::size_t>(max_inflight, 1, std::max<std::size_t>(requests.size(), 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
  }

  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw DispatchFailure(i, e.what(), errors[i]);
    }
  }
  return results;
}

}  // namespace panostitch
