#pragma once

#include <optional>
#include <string>
#include <vector>

namespace crackdual {

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

struct Segment {
  Point a;
  Point b;
};

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
  bool contains_closed(Point p) const {
    return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
  }
  bool contains_open(Point p) const {
    return p.x > x0 && p.x < x1 && p.y > y0 && p.y < y1;
  }
};

class Domain {
public:
  Domain() = default;
  explicit Domain(Rect outer, std::vector<Rect> holes = {});

  const Rect& outer() const { return outer_; }
  const std::vector<Rect>& holes() const { return holes_; }
  bool simply_connected() const { return holes_.empty(); }
  double diameter() const;
  // Closed domain: outer rectangle minus open holes.
  bool contains(Point p) const;
  bool contains(const Segment& s) const;
  // Boundary of the outer rectangle and of every hole, as axis-aligned segments.
  std::vector<Segment> boundary_segments() const;
  bool on_boundary(Point p) const;

private:
  Rect outer_{};
  std::vector<Rect> holes_;
};

struct Polyline {
  std::vector<Point> vertices;
};

class CrackSet {
public:
  CrackSet() = default;
  explicit CrackSet(std::vector<Polyline> polylines);

  const std::vector<Polyline>& polylines() const { return polylines_; }
  bool empty() const { return polylines_.empty(); }
  std::vector<Segment> segments() const;
  // Segments tagged with the index of their polyline.
  std::vector<std::pair<Segment, int>> tagged_segments() const;

private:
  std::vector<Polyline> polylines_;
};

class BoundarySpec {
public:
  BoundarySpec() = default;
  BoundarySpec(const Domain& domain, std::vector<Segment> dirichlet);

  const std::vector<Segment>& dirichlet() const { return dirichlet_; }
  // Maximal connected Neumann arcs, each as a chain of boundary segments.
  const std::vector<std::vector<Segment>>& neumann_arcs() const { return neumann_; }
  bool on_dirichlet(Point p) const;
  // Point on the open Neumann part (boundary minus closed Dirichlet arcs).
  bool on_neumann(Point p) const;

private:
  std::vector<Segment> dirichlet_;
  std::vector<std::vector<Segment>> neumann_;
};

struct ComponentPartition {
  int count = 0;
  std::vector<int> polyline_component;
  std::vector<int> arc_component;
};

double point_segment_distance(Point p, const Segment& s);
double segment_distance(const Segment& s, const Segment& t);

double hausdorff_distance(const CrackSet& a, const CrackSet& b, const Domain& domain);

ComponentPartition connected_components(const CrackSet& k, const BoundarySpec& boundary,
                                        const Domain& domain);

enum class Example { ex5_1, ex5_3, ex5_5, ex5_7 };

Example parse_example(const std::string& id);
std::string to_string(Example e);

struct FamilyParams {
  // ex5_3 and ex5_5 channel: width a, height b. Unset values follow the example defaults.
  std::optional<double> a;
  std::optional<double> b;
  // Target (1/p) a b^{1-p}; 0 selects a = b^p.
  double c = 0.5;
  double p = 3.0;
  // Default height b_h = h^{-b_power}.
  double b_power = 1.0;
  // ex5_7 branch length and gap (gap defaults to 1/h).
  double arm = 0.5;
  std::optional<double> gap;
  // Snap coordinates to multiples of pitch when > 0.
  double pitch = 0.0;
};

Domain example_domain(Example e);
BoundarySpec example_boundary(Example e, const Domain& domain);
CrackSet crack_family(Example e, int h, const FamilyParams& params = {});
CrackSet crack_limit(Example e, const FamilyParams& params = {});
// The point where distinct components of K_h collapse onto the limit set.
Point contact_point(Example e);
// Channel parameters (a_h, b_h) used by ex5_3 and ex5_5 at index h.
std::pair<double, double> channel_params(Example e, int h, const FamilyParams& params);

}  // namespace crackdual
