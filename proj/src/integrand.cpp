#include "crackdual/integrand.hpp"

#include <algorithm>
#include <cmath>

#include "crackdual/errors.hpp"
#include "crackdual/mesh.hpp"

namespace crackdual {

namespace {

void check_p(double p) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw Error(ErrorKind::invalid_p, "exponent p must lie in (1, inf)");
}

}  // namespace

Integrand::Integrand(double p, double eps) : p_(p), eps_(eps) {
  check_p(p);
  if (eps < 0) throw Error(ErrorKind::invalid_parameters, "regularization must be >= 0");
}

Integrand::Integrand(double p, std::vector<double> cell_weights, double eps)
    : kind_(IntegrandKind::weighted_p_power), p_(p), eps_(eps), weights_(std::move(cell_weights)) {
  check_p(p);
  if (eps < 0) throw Error(ErrorKind::invalid_parameters, "regularization must be >= 0");
  for (double w : weights_)
    if (!(w > 0) || !std::isfinite(w))
      throw Error(ErrorKind::invalid_parameters, "weights must be positive");
}

Integrand Integrand::with_eps(double eps) const {
  Integrand f = *this;
  if (eps < 0) throw Error(ErrorKind::invalid_parameters, "regularization must be >= 0");
  f.eps_ = eps;
  return f;
}

double Integrand::eval(int cell, Vec2 xi) const {
  const double t = xi[0] * xi[0] + xi[1] * xi[1] + eps_ * eps_;
  if (t == 0.0) return 0.0;
  return weight(cell) * (std::pow(t, 0.5 * p_) - std::pow(eps_, p_)) / p_;
}

Vec2 Integrand::grad(int cell, Vec2 xi) const {
  const double t = xi[0] * xi[0] + xi[1] * xi[1] + eps_ * eps_;
  if (t == 0.0) {
    if (p_ < 2.0)
      throw Error(ErrorKind::singular_evaluation, "gradient undefined at 0 for p < 2 and eps = 0");
    return {0.0, 0.0};
  }
  const double s = weight(cell) * std::pow(t, 0.5 * (p_ - 2.0));
  return {s * xi[0], s * xi[1]};
}

GrowthConstants Integrand::growth() const {
  double wmin = 1.0, wmax = 1.0;
  if (!weights_.empty()) {
    wmin = *std::min_element(weights_.begin(), weights_.end());
    wmax = *std::max_element(weights_.begin(), weights_.end());
  }
  GrowthConstants g;
  const double ep = std::pow(eps_, p_);
  g.alpha = wmin / p_;
  if (p_ >= 2.0) {
    // (s^2 + e^2)^{p/2} <= 2^{p/2-1} (s^p + e^p) by convexity.
    const double k = std::pow(2.0, 0.5 * p_ - 1.0);
    g.beta = wmax * k / p_;
    g.gamma = wmax * (k - 1.0) * ep / p_;
  } else {
    g.beta = wmax / p_;
    g.gamma = 0.0;
    g.gamma_lower = wmax * ep / p_;
  }
  return g;
}

std::vector<double> region_weights(const GridMesh& mesh, const std::vector<WeightRegion>& regions,
                                   double default_value) {
  std::vector<double> w(mesh.cells.size(), default_value);
  for (std::size_t t = 0; t < mesh.cells.size(); ++t) {
    const Cell& c = mesh.cells[t];
    Point g{0, 0};
    for (int n : c.node) {
      g.x += mesh.node_x(n) / 3.0;
      g.y += mesh.node_y(n) / 3.0;
    }
    for (const WeightRegion& r : regions)
      if (r.rect.contains_closed(g)) w[t] = r.value;
  }
  return w;
}

double ConjugateIntegrand::coefficient(int cell) const {
  return std::pow(weight(cell), 1.0 - q_);
}

double ConjugateIntegrand::eval(int cell, Vec2 zeta) const {
  const double s = std::hypot(zeta[0], zeta[1]);
  if (s == 0.0) return 0.0;
  return coefficient(cell) * std::pow(s, q_) / q_;
}

Vec2 ConjugateIntegrand::grad(int cell, Vec2 zeta) const {
  const double s2 = zeta[0] * zeta[0] + zeta[1] * zeta[1];
  if (s2 == 0.0) {
    if (q_ < 2.0)
      throw Error(ErrorKind::singular_evaluation, "conjugate gradient undefined at 0 for q < 2");
    return {0.0, 0.0};
  }
  const double k = coefficient(cell) * std::pow(s2, 0.5 * (q_ - 2.0));
  return {k * zeta[0], k * zeta[1]};
}

ConjugateIntegrand conjugate(const Integrand& f) {
  if (f.eps() != 0.0)
    throw Error(ErrorKind::unsupported_conjugate,
                "conjugate is only available for the unregularized power integrand");
  ConjugateIntegrand c;
  c.p_ = f.p();
  c.q_ = conjugate_exponent(f.p());
  c.weights_ = f.weights();
  return c;
}

}  // namespace crackdual
