#pragma once

// Thin FFTW wrapper. Plans are created once per (dim, N) under a mutex and
// executed through the new-array interface, which FFTW documents as
// thread-safe. FFTW_ESTIMATE keeps plan selection (and therefore rounding)
// identical from run to run.

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "nlcl/grid.hpp"

namespace nlcl::fft {

enum class Direction { forward, backward };

class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int dim, std::size_t n, Direction dir) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(dim, n, dir);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    std::size_t total = 1;
    for (int d = 0; d < dim; ++d) total *= n;
    std::vector<std::complex<double>> a(total), b(total);
    int dims[3] = {static_cast<int>(n), static_cast<int>(n), static_cast<int>(n)};
    const int sign = dir == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD;
    fftw_plan plan = fftw_plan_dft(dim, dims, reinterpret_cast<fftw_complex*>(a.data()),
                                   reinterpret_cast<fftw_complex*>(b.data()), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_PRESERVE_INPUT);
    if (plan == nullptr) throw std::runtime_error("fft: plan creation failed");
    plans_.emplace(key, plan);
    return plan;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  std::mutex mutex_;
  std::map<std::tuple<int, std::size_t, Direction>, fftw_plan> plans_;
};

/// Unnormalized transform of `in` into `out` (sizes must match the grid).
inline void execute(const Grid& grid, Direction dir, const std::complex<double>* in,
                    std::complex<double>* out) {
  fftw_plan plan = PlanCache::instance().get(grid.dim(), grid.points_per_dim(), dir);
  // FFTW's new-array execute takes a non-const input; out-of-place c2c plans
  // do not modify it.
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace nlcl::fft
