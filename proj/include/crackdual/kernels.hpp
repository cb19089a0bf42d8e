#pragma once

#include <span>

namespace crackdual::kernels {

enum class Backend { scalar, avx2 };

const char* name(Backend b);
bool available(Backend b);
// Backend used by the dispatching entry points. Chosen once from the CPU and the
// CRACKDUAL_KERNELS environment variable (scalar | avx2 | auto).
Backend active();
void set_active(Backend b);

// Regularized power law over cells. For t = gx^2 + gy^2 + eps^2 writes
// scale[i] = w[i] t^{(p-2)/2} and returns sum w[i] (t^{p/2} - eps^p) / p.
double power_cells(std::span<const double> gx, std::span<const double> gy,
                   std::span<const double> w, double p, double eps, std::span<double> scale);
// sum w[i] |(dx, dy)|^p
double power_sum(std::span<const double> dx, std::span<const double> dy,
                 std::span<const double> w, double p);

namespace scalar {
double power_cells(std::span<const double> gx, std::span<const double> gy,
                   std::span<const double> w, double p, double eps, std::span<double> scale);
double power_sum(std::span<const double> dx, std::span<const double> dy,
                 std::span<const double> w, double p);
}  // namespace scalar

namespace avx2 {
// Exponents that are not multiples of 1/2 fall back to the scalar kernels.
bool supports_exponent(double p);
double power_cells(std::span<const double> gx, std::span<const double> gy,
                   std::span<const double> w, double p, double eps, std::span<double> scale);
double power_sum(std::span<const double> dx, std::span<const double> dy,
                 std::span<const double> w, double p);
}  // namespace avx2

}  // namespace crackdual::kernels
