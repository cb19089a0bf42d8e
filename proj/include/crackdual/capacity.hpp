#pragma once

#include <vector>

#include "crackdual/geometry.hpp"

namespace crackdual {

struct Disk {
  Point center;
  double radius = 0;
};

// The set E whose capacity is estimated.
struct CapacitySet {
  enum class Kind { cracks, disk, points };
  Kind kind = Kind::points;
  CrackSet cracks;
  Disk disk;
  std::vector<Point> points;

  bool empty() const;
  double distance(Point p) const;
  // Smallest axis-aligned box holding the set (undefined when empty).
  Rect bounds() const;
};

// Container B, a disk or a rectangle.
struct Container {
  enum class Kind { rect, disk };
  Kind kind = Kind::disk;
  Rect rect;
  Disk disk{{0, 0}, 1};

  Rect bounding_box() const;
  // Strictly inside B.
  bool interior(Point p) const;
};

struct CapacityQuery {
  CapacitySet set;
  Container container;
  double r = 2;
  // Neighborhood radius in units of the mesh spacing.
  double delta_cells = 1.5;
  // Cells per unit length.
  double resolution = 64;
  double tol = 0;
};

struct CapacityRow {
  double resolution = 0;
  double delta = 0;
  double estimate = 0;
  int iterations = 0;
  bool converged = false;
};

// min sum |grad u|^r with u = 1 on DOFs within delta of E and u = 0 on and outside the
// boundary of B.
CapacityRow estimate_capacity_row(const CapacityQuery& q);
double estimate_capacity(const CapacityQuery& q);
std::vector<CapacityRow> capacity_table(CapacityQuery q, const std::vector<double>& resolutions);

// 2 pi / ln(R / rho) for concentric disks and r = 2.
double disk_capacity_r2(double rho, double R);
// Radial capacity of concentric disks for r > 1.
double disk_capacity(double rho, double R, double r);

}  // namespace crackdual
