#include "crackdual/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "crackdual/descent.hpp"
#include "crackdual/errors.hpp"
#include "crackdual/integrand.hpp"
#include "crackdual/kernels.hpp"
#include "crackdual/mesh.hpp"
#include "crackdual/primal.hpp"

namespace crackdual {

bool CapacitySet::empty() const {
  switch (kind) {
    case Kind::cracks: return cracks.empty();
    case Kind::disk: return false;
    case Kind::points: return points.empty();
  }
  return true;
}

double CapacitySet::distance(Point p) const {
  switch (kind) {
    case Kind::cracks: {
      double d = INFINITY;
      for (const Segment& s : cracks.segments()) d = std::min(d, point_segment_distance(p, s));
      for (const Polyline& pl : cracks.polylines())
        if (pl.vertices.size() == 1)
          d = std::min(d, std::hypot(p.x - pl.vertices[0].x, p.y - pl.vertices[0].y));
      return d;
    }
    case Kind::disk:
      return std::max(0.0, std::hypot(p.x - disk.center.x, p.y - disk.center.y) - disk.radius);
    case Kind::points: {
      double d = INFINITY;
      for (Point q : points) d = std::min(d, std::hypot(p.x - q.x, p.y - q.y));
      return d;
    }
  }
  return INFINITY;
}

Rect CapacitySet::bounds() const {
  Rect r{INFINITY, INFINITY, -INFINITY, -INFINITY};
  auto add = [&](Point p) {
    r.x0 = std::min(r.x0, p.x);
    r.y0 = std::min(r.y0, p.y);
    r.x1 = std::max(r.x1, p.x);
    r.y1 = std::max(r.y1, p.y);
  };
  switch (kind) {
    case Kind::cracks:
      for (const Polyline& pl : cracks.polylines())
        for (Point p : pl.vertices) add(p);
      break;
    case Kind::disk:
      add({disk.center.x - disk.radius, disk.center.y - disk.radius});
      add({disk.center.x + disk.radius, disk.center.y + disk.radius});
      break;
    case Kind::points:
      for (Point p : points) add(p);
      break;
  }
  return r;
}

Rect Container::bounding_box() const {
  if (kind == Kind::rect) return rect;
  return {disk.center.x - disk.radius, disk.center.y - disk.radius, disk.center.x + disk.radius,
          disk.center.y + disk.radius};
}

bool Container::interior(Point p) const {
  if (kind == Kind::rect) return rect.contains_open(p);
  return std::hypot(p.x - disk.center.x, p.y - disk.center.y) < disk.radius;
}

namespace {

bool set_inside(const CapacitySet& e, const Container& b) {
  switch (e.kind) {
    case CapacitySet::Kind::cracks:
      for (const Polyline& pl : e.cracks.polylines())
        for (Point p : pl.vertices)
          if (!b.interior(p)) return false;
      return true;
    case CapacitySet::Kind::points:
      return std::all_of(e.points.begin(), e.points.end(),
                         [&](Point p) { return b.interior(p); });
    case CapacitySet::Kind::disk: {
      const Disk& d = e.disk;
      if (b.kind == Container::Kind::disk)
        return std::hypot(d.center.x - b.disk.center.x, d.center.y - b.disk.center.y) + d.radius <
               b.disk.radius;
      const Rect r = e.bounds();
      return b.rect.contains_open({r.x0, r.y0}) && b.rect.contains_open({r.x1, r.y1});
    }
  }
  return false;
}

}  // namespace

CapacityRow estimate_capacity_row(const CapacityQuery& q) {
  if (!(q.r > 1)) throw Error(ErrorKind::invalid_p, "capacity exponent must exceed 1");
  if (!(q.delta_cells >= 1)) throw Error(ErrorKind::resolution, "delta must be at least one cell");
  if (!set_inside(q.set, q.container))
    throw Error(ErrorKind::domain_violation, "set is not contained in the container");
  CapacityRow row;
  row.resolution = q.resolution;
  const double spacing = 1.0 / q.resolution;
  row.delta = q.delta_cells * spacing;
  if (q.set.empty()) {
    row.converged = true;
    return row;
  }

  const Domain box(q.container.bounding_box());
  const BoundarySpec bs(box, box.boundary_segments());
  const GridMesh mesh = build_mesh(box, CrackSet{}, bs, q.resolution);
  ConvexProblem prob = primal_problem(mesh, Integrand(q.r));
  // Energy sum area |grad u|^r rather than the 1/r-scaled form.
  for (double& m : prob.meas) m *= q.r;

  std::vector<double> z(mesh.dof_count(), 0.0);
  prob.unknown.assign(prob.n_dofs, -1);
  prob.n_unknowns = 0;
  // Tolerance against rounding of node coordinates.
  const double reach = row.delta * (1 + 1e-12);
  int clamped = 0;
  for (int d = 0; d < mesh.dof_count(); ++d) {
    const Point p{mesh.dofs[d].x, mesh.dofs[d].y};
    if (!q.container.interior(p)) continue;
    if (q.set.distance(p) <= reach) {
      z[d] = 1.0;
      ++clamped;
      continue;
    }
    prob.unknown[d] = prob.n_unknowns++;
  }
  if (clamped == 0) throw Error(ErrorKind::resolution, "no node lies within delta of the set");

  DescentOptions opt;
  opt.tol = q.tol > 0 ? q.tol : default_tolerance(q.r);
  opt.keep_log = false;
  const DescentResult res = minimize(prob, z, opt);
  row.iterations = res.iterations;
  row.converged = res.converged;

  ScalarField u{res.z};
  const GradientField g = gradient(mesh, u);
  std::vector<double> w(mesh.cells.size()), scale(mesh.cells.size());
  for (std::size_t t = 0; t < mesh.cells.size(); ++t) w[t] = mesh.cells[t].area * q.r;
  row.estimate = kernels::power_cells(g.gx, g.gy, w, q.r, 0.0, scale);
  return row;
}

double estimate_capacity(const CapacityQuery& q) {
  const CapacityRow row = estimate_capacity_row(q);
  if (!row.converged) throw Error(ErrorKind::non_convergence, "capacity solve did not converge");
  return row.estimate;
}

std::vector<CapacityRow> capacity_table(CapacityQuery q, const std::vector<double>& resolutions) {
  std::vector<CapacityRow> rows;
  for (double res : resolutions) {
    q.resolution = res;
    rows.push_back(estimate_capacity_row(q));
  }
  return rows;
}

double disk_capacity_r2(double rho, double R) { return 2 * std::numbers::pi / std::log(R / rho); }

double disk_capacity(double rho, double R, double r) {
  if (r == 2) return disk_capacity_r2(rho, R);
  // u' = -k s^{-1/(r-1)} on rho < s < R.
  const double e = (r - 2) / (r - 1);
  const double integral = (std::pow(R, e) - std::pow(rho, e)) / e;
  return 2 * std::numbers::pi * std::pow(1.0 / integral, r - 1);
}

}  // namespace crackdual
