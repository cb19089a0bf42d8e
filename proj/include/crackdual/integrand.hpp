#pragma once

#include <array>
#include <vector>

#include "crackdual/geometry.hpp"

namespace crackdual {

class GridMesh;

using Vec2 = std::array<double, 2>;

enum class IntegrandKind { p_power, weighted_p_power };

struct WeightRegion {
  Rect rect;
  double value = 1.0;
};

struct GrowthConstants {
  double alpha = 0;
  double beta = 0;
  double gamma = 0;
  // Offset needed in the lower bound alpha |xi|^p - gamma_lower <= f (nonzero only
  // for p < 2 with regularization).
  double gamma_lower = 0;
};

class Integrand {
public:
  Integrand() = default;
  explicit Integrand(double p, double eps = 0.0);
  // Per-cell weights; cells are identified by index.
  Integrand(double p, std::vector<double> cell_weights, double eps = 0.0);

  IntegrandKind kind() const { return kind_; }
  double p() const { return p_; }
  double eps() const { return eps_; }
  double weight(int cell) const { return weights_.empty() ? 1.0 : weights_[cell]; }
  const std::vector<double>& weights() const { return weights_; }
  Integrand with_eps(double eps) const;

  double eval(int cell, Vec2 xi) const;
  Vec2 grad(int cell, Vec2 xi) const;
  GrowthConstants growth() const;

private:
  IntegrandKind kind_ = IntegrandKind::p_power;
  double p_ = 2.0;
  double eps_ = 0.0;
  std::vector<double> weights_;
};

// Cell weights from rectangular regions (centroid rule); cells outside all regions get
// the default.
std::vector<double> region_weights(const GridMesh& mesh, const std::vector<WeightRegion>& regions,
                                   double default_value);

class ConjugateIntegrand {
public:
  double p() const { return p_; }
  double q() const { return q_; }
  double weight(int cell) const { return weights_.empty() ? 1.0 : weights_[cell]; }
  // Multiplier w^{1-q} in front of |zeta|^q / q.
  double coefficient(int cell) const;
  double eval(int cell, Vec2 zeta) const;
  Vec2 grad(int cell, Vec2 zeta) const;

private:
  friend ConjugateIntegrand conjugate(const Integrand& f);
  double p_ = 2.0, q_ = 2.0;
  std::vector<double> weights_;
};

ConjugateIntegrand conjugate(const Integrand& f);

inline double conjugate_exponent(double p) { return p / (p - 1.0); }

}  // namespace crackdual
