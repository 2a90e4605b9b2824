#include "rweld/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

#include "rweld/error.hpp"

namespace rweld::fft {
namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
// Plans are cached per (rank, n, direction) and built on scratch buffers so the
// caller's data is never clobbered by planning.
std::mutex plan_mutex;

struct PlanCache {
  std::map<std::tuple<int, std::size_t, int>, fftw_plan> plans;
  ~PlanCache() {
    for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
  }
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

fftw_plan get_plan(int rank, std::size_t n, Direction dir) {
  const int sign = dir == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD;
  std::lock_guard lock(plan_mutex);
  auto key = std::make_tuple(rank, n, sign);
  auto it = cache().plans.find(key);
  if (it != cache().plans.end()) return it->second;

  const std::size_t total = rank == 1 ? n : n * n;
  auto* scratch = fftw_alloc_complex(total);
  fftw_plan plan = rank == 1
      ? fftw_plan_dft_1d(static_cast<int>(n), scratch, scratch, sign, FFTW_ESTIMATE | FFTW_UNALIGNED)
      : fftw_plan_dft_2d(static_cast<int>(n), static_cast<int>(n), scratch, scratch, sign,
                         FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(scratch);
  if (plan == nullptr) throw ConfigError("fftw: failed to create plan");
  cache().plans.emplace(key, plan);
  return plan;
}

void execute(fftw_plan plan, std::span<cplx> data) {
  // Plans are FFTW_UNALIGNED: std::vector storage only guarantees 16 bytes.
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, ptr, ptr);
}

}  // namespace

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

void transform_1d(std::span<cplx> data, Direction dir) {
  if (data.empty()) return;
  execute(get_plan(1, data.size(), dir), data);
}

void transform_2d(std::span<cplx> data, std::size_t n, Direction dir) {
  if (data.size() != n * n) throw ConfigError("fft: 2-D transform expects a square n x n array");
  if (n == 0) return;
  execute(get_plan(2, n, dir), data);
}

}  // namespace rweld::fft
