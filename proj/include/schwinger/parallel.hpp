#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "schwinger/spectral.hpp"

namespace schwinger {

/// Worker count from SCHWINGER_WORKERS, else the hardware concurrency.
unsigned default_workers();

/// Pins the BLAS backend to one thread so results do not depend on how many
/// workers run concurrently.
void single_threaded_blas();

template <class R>
struct Outcome {
  std::optional<R> value;
  std::string error;     // empty on success
  bool numerical = false;  // error came from a NumericalError
};

/// Runs f(i) for i in [0, n) on `workers` threads pulling indices from a
/// shared counter. Results are returned in index order; exceptions are
/// captured per index.
template <class R, class F>
std::vector<Outcome<R>> parallel_map(std::size_t n, unsigned workers, F&& f) {
  std::vector<Outcome<R>> out(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i].value.emplace(f(i));
      } catch (const NumericalError& e) {
        out[i].error = e.what();
        out[i].numerical = true;
      } catch (const std::exception& e) {
        out[i].error = e.what();
      } catch (...) {
        out[i].error = "unknown exception";
      }
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (workers == 1) {
    work();
    return out;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace schwinger
