#include <atomic>
#include <cstdlib>
#include <string>

#include "crackdual/kernels.hpp"

namespace crackdual::kernels {

namespace {

Backend detect() {
  Backend best = available(Backend::avx2) ? Backend::avx2 : Backend::scalar;
  if (const char* env = std::getenv("CRACKDUAL_KERNELS")) {
    const std::string v(env);
    if (v == "scalar") return Backend::scalar;
    if (v == "avx2" && available(Backend::avx2)) return Backend::avx2;
  }
  return best;
}

std::atomic<Backend>& slot() {
  static std::atomic<Backend> b{detect()};
  return b;
}

}  // namespace

const char* name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

bool available(Backend b) {
  if (b == Backend::scalar) return true;
#if defined(CRACKDUAL_X86)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend active() { return slot().load(std::memory_order_relaxed); }

void set_active(Backend b) {
  if (available(b)) slot().store(b, std::memory_order_relaxed);
}

double power_cells(std::span<const double> gx, std::span<const double> gy,
                   std::span<const double> w, double p, double eps, std::span<double> scale) {
  if (active() == Backend::avx2) return avx2::power_cells(gx, gy, w, p, eps, scale);
  return scalar::power_cells(gx, gy, w, p, eps, scale);
}

double power_sum(std::span<const double> dx, std::span<const double> dy,
                 std::span<const double> w, double p) {
  if (active() == Backend::avx2) return avx2::power_sum(dx, dy, w, p);
  return scalar::power_sum(dx, dy, w, p);
}

}  // namespace crackdual::kernels
