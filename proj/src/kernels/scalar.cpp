#include <cmath>

#include "crackdual/kernels.hpp"

namespace crackdual::kernels::scalar {

double power_cells(std::span<const double> gx, std::span<const double> gy,
                   std::span<const double> w, double p, double eps, std::span<double> scale) {
  const double e = 0.5 * (p - 2.0);
  const double eps2 = eps * eps;
  const double epsp = std::pow(eps, p);
  double sum = 0.0;
  for (std::size_t i = 0; i < gx.size(); ++i) {
    const double t = gx[i] * gx[i] + gy[i] * gy[i] + eps2;
    if (t == 0.0) {
      scale[i] = (p == 2.0) ? w[i] : 0.0;
      continue;
    }
    const double te = std::pow(t, e);
    scale[i] = w[i] * te;
    sum += w[i] * (t * te - epsp);
  }
  return sum / p;
}

double power_sum(std::span<const double> dx, std::span<const double> dy,
                 std::span<const double> w, double p) {
  const double e = 0.5 * p;
  double sum = 0.0;
  for (std::size_t i = 0; i < dx.size(); ++i) {
    const double t = dx[i] * dx[i] + dy[i] * dy[i];
    if (t > 0.0) sum += w[i] * std::pow(t, e);
  }
  return sum;
}

}  // namespace crackdual::kernels::scalar
