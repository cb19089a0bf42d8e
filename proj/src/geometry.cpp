#include "crackdual/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "crackdual/errors.hpp"

namespace crackdual {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::domain_violation: return "domain violation";
    case ErrorKind::resolution: return "resolution error";
    case ErrorKind::unknown_example: return "unknown example";
    case ErrorKind::invalid_parameters: return "invalid parameters";
    case ErrorKind::size_mismatch: return "size mismatch";
    case ErrorKind::singular_evaluation: return "singular evaluation";
    case ErrorKind::unsupported_conjugate: return "unsupported conjugate";
    case ErrorKind::non_convergence: return "non-convergence";
    case ErrorKind::invalid_p: return "invalid p";
    case ErrorKind::invalid_dual_field: return "invalid dual field";
    case ErrorKind::flux_not_conservative: return "flux not conservative";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::config: return "config error";
    case ErrorKind::missing_contact: return "missing contact data";
  }
  return "error";
}

namespace {

std::string fmt_point(Point p) {
  std::ostringstream os;
  os << "(" << p.x << ", " << p.y << ")";
  return os.str();
}

bool on_segment(Point p, const Segment& s) {
  const double xlo = std::min(s.a.x, s.b.x), xhi = std::max(s.a.x, s.b.x);
  const double ylo = std::min(s.a.y, s.b.y), yhi = std::max(s.a.y, s.b.y);
  if (p.x < xlo || p.x > xhi || p.y < ylo || p.y > yhi) return false;
  // Axis-aligned segments: the bounding box test is exact.
  if (s.a.x == s.b.x || s.a.y == s.b.y) return true;
  const double cross = (s.b.x - s.a.x) * (p.y - s.a.y) - (s.b.y - s.a.y) * (p.x - s.a.x);
  return cross == 0.0;
}

bool segments_touch(const Segment& s, const Segment& t) {
  const double sx0 = std::min(s.a.x, s.b.x), sx1 = std::max(s.a.x, s.b.x);
  const double sy0 = std::min(s.a.y, s.b.y), sy1 = std::max(s.a.y, s.b.y);
  const double tx0 = std::min(t.a.x, t.b.x), tx1 = std::max(t.a.x, t.b.x);
  const double ty0 = std::min(t.a.y, t.b.y), ty1 = std::max(t.a.y, t.b.y);
  // Exact for axis-aligned segments, whose point sets are their bounding boxes.
  return sx0 <= tx1 && tx0 <= sx1 && sy0 <= ty1 && ty0 <= sy1;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// Boundary loop of a rectangle, counterclockwise from the lower-left corner.
struct Loop {
  Rect r;
  double perimeter() const { return 2.0 * ((r.x1 - r.x0) + (r.y1 - r.y0)); }
  bool contains(Point p) const {
    if (!r.contains_closed(p)) return false;
    return p.x == r.x0 || p.x == r.x1 || p.y == r.y0 || p.y == r.y1;
  }
  // Arc length of p, with the lower-left corner at 0.
  double arc(Point p) const {
    const double w = r.x1 - r.x0, h = r.y1 - r.y0;
    if (p.y == r.y0) return p.x - r.x0;
    if (p.x == r.x1) return w + (p.y - r.y0);
    if (p.y == r.y1) return w + h + (r.x1 - p.x);
    return 2 * w + h + (r.y1 - p.y);
  }
  Point at(double s) const {
    const double w = r.x1 - r.x0, h = r.y1 - r.y0;
    const double P = perimeter();
    s = std::fmod(s, P);
    if (s < 0) s += P;
    if (s <= w) return {r.x0 + s, r.y0};
    if (s <= w + h) return {r.x1, r.y0 + (s - w)};
    if (s <= 2 * w + h) return {r.x1 - (s - w - h), r.y1};
    return {r.x0, r.y1 - (s - 2 * w - h)};
  }
  std::vector<double> corners() const {
    const double w = r.x1 - r.x0, h = r.y1 - r.y0;
    return {0.0, w, w + h, 2 * w + h};
  }
};

// Chain of segments along the loop from arc s0 to s1 (s1 may exceed the perimeter).
std::vector<Segment> loop_chain(const Loop& loop, double s0, double s1) {
  const double P = loop.perimeter();
  std::vector<double> cuts{s0};
  for (int wrap = 0; wrap < 3; ++wrap) {
    for (double c : loop.corners()) {
      const double cc = c + wrap * P;
      if (cc > s0 && cc < s1) cuts.push_back(cc);
    }
  }
  cuts.push_back(s1);
  std::sort(cuts.begin(), cuts.end());
  std::vector<Segment> out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] > cuts[i]) out.push_back({loop.at(cuts[i]), loop.at(cuts[i + 1])});
  }
  // Pin the exact corner coordinates.
  for (auto& seg : out) {
    auto snap = [&](Point& p) {
      for (double c : loop.corners()) {
        Point q = loop.at(c);
        if (std::abs(q.x - p.x) + std::abs(q.y - p.y) < 1e-12 * (1 + P)) p = q;
      }
    };
    snap(seg.a);
    snap(seg.b);
  }
  return out;
}

// Squared distance from a point moving on s to segment t, as piecewise quadratics in
// the arc parameter tau in [0, L].
struct Quadratic {
  double lo, hi;
  double c2, c1, c0;
  double operator()(double t) const { return (c2 * t + c1) * t + c0; }
};

std::vector<Quadratic> distance_pieces(const Segment& s, const Segment& t) {
  const double L = std::hypot(s.b.x - s.a.x, s.b.y - s.a.y);
  const double ex = L > 0 ? (s.b.x - s.a.x) / L : 0.0;
  const double ey = L > 0 ? (s.b.y - s.a.y) / L : 0.0;
  const double Lt = std::hypot(t.b.x - t.a.x, t.b.y - t.a.y);
  std::vector<Quadratic> out;
  auto fixed = [&](Point c, double lo, double hi) {
    // |a + tau e - c|^2
    const double wx = s.a.x - c.x, wy = s.a.y - c.y;
    out.push_back({lo, hi, ex * ex + ey * ey, 2 * (wx * ex + wy * ey), wx * wx + wy * wy});
  };
  if (Lt == 0.0) {
    fixed(t.a, 0.0, L);
    return out;
  }
  const double fx = (t.b.x - t.a.x) / Lt, fy = (t.b.y - t.a.y) / Lt;
  // mu(tau) = (a + tau e - t.a) . f
  const double m0 = (s.a.x - t.a.x) * fx + (s.a.y - t.a.y) * fy;
  const double m1 = ex * fx + ey * fy;
  std::vector<double> brk{0.0, L};
  if (m1 != 0.0) {
    for (double target : {0.0, Lt}) {
      const double tau = (target - m0) / m1;
      if (tau > 0.0 && tau < L) brk.push_back(tau);
    }
  }
  std::sort(brk.begin(), brk.end());
  for (std::size_t i = 0; i + 1 < brk.size(); ++i) {
    const double lo = brk[i], hi = brk[i + 1];
    const double mid = 0.5 * (lo + hi);
    const double mu = m0 + m1 * mid;
    if (mu <= 0.0) {
      fixed(t.a, lo, hi);
    } else if (mu >= Lt) {
      fixed(t.b, lo, hi);
    } else {
      // Perpendicular component w0 + tau w1 of (a + tau e - t.a).
      const double w0x = (s.a.x - t.a.x) - m0 * fx, w0y = (s.a.y - t.a.y) - m0 * fy;
      const double w1x = ex - m1 * fx, w1y = ey - m1 * fy;
      out.push_back({lo, hi, w1x * w1x + w1y * w1y, 2 * (w0x * w1x + w0y * w1y),
                     w0x * w0x + w0y * w0y});
    }
  }
  if (out.empty()) fixed(t.a, 0.0, L);
  return out;
}

void quadratic_roots(double a, double b, double c, std::vector<double>& out) {
  const double scale = std::max({std::abs(a), std::abs(b), std::abs(c)});
  if (scale == 0.0) return;
  if (std::abs(a) <= 1e-14 * scale) {
    if (std::abs(b) > 1e-14 * scale) out.push_back(-c / b);
    return;
  }
  const double disc = b * b - 4 * a * c;
  if (disc < 0) {
    if (disc > -1e-12 * b * b) out.push_back(-b / (2 * a));
    return;
  }
  const double sq = std::sqrt(disc);
  const double q = -0.5 * (b + (b >= 0 ? sq : -sq));
  if (q != 0.0) out.push_back(c / q);
  out.push_back(q / a);
}

double directed_hausdorff(const std::vector<Segment>& A, const std::vector<Segment>& B) {
  double best = 0.0;
  for (const Segment& s : A) {
    const double L = std::hypot(s.b.x - s.a.x, s.b.y - s.a.y);
    const double ex = L > 0 ? (s.b.x - s.a.x) / L : 0.0;
    const double ey = L > 0 ? (s.b.y - s.a.y) / L : 0.0;
    std::vector<std::vector<Quadratic>> pieces;
    pieces.reserve(B.size());
    for (const Segment& t : B) pieces.push_back(distance_pieces(s, t));
    std::vector<double> cand{0.0, L};
    for (const auto& pc : pieces)
      for (const auto& q : pc) cand.push_back(q.lo);
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      for (std::size_t j = i + 1; j < pieces.size(); ++j) {
        for (const auto& qi : pieces[i]) {
          for (const auto& qj : pieces[j]) {
            const double lo = std::max(qi.lo, qj.lo), hi = std::min(qi.hi, qj.hi);
            if (lo > hi) continue;
            std::vector<double> roots;
            quadratic_roots(qi.c2 - qj.c2, qi.c1 - qj.c1, qi.c0 - qj.c0, roots);
            for (double r : roots)
              if (r >= lo && r <= hi) cand.push_back(r);
          }
        }
      }
    }
    for (double tau : cand) {
      tau = std::clamp(tau, 0.0, L);
      const Point x = (tau == L) ? s.b : Point{s.a.x + tau * ex, s.a.y + tau * ey};
      double d = INFINITY;
      for (const Segment& t : B) d = std::min(d, point_segment_distance(x, t));
      best = std::max(best, d);
    }
  }
  return best;
}

double snap(double v, double pitch) {
  if (pitch <= 0.0) return v;
  return std::round(v / pitch) * pitch;
}

Polyline line(std::initializer_list<Point> pts, double pitch) {
  Polyline pl;
  for (Point p : pts) pl.vertices.push_back({snap(p.x, pitch), snap(p.y, pitch)});
  return pl;
}

}  // namespace

// ---------------------------------------------------------------- Domain

Domain::Domain(Rect outer, std::vector<Rect> holes) : outer_(outer), holes_(std::move(holes)) {
  if (!(outer_.x1 > outer_.x0 && outer_.y1 > outer_.y0))
    throw Error(ErrorKind::domain_violation, "outer rectangle is empty");
  for (std::size_t i = 0; i < holes_.size(); ++i) {
    const Rect& h = holes_[i];
    if (!(h.x1 > h.x0 && h.y1 > h.y0) || !(h.x0 > outer_.x0 && h.x1 < outer_.x1 &&
                                           h.y0 > outer_.y0 && h.y1 < outer_.y1))
      throw Error(ErrorKind::domain_violation, "hole not strictly inside outer rectangle");
    for (std::size_t j = 0; j < i; ++j) {
      const Rect& g = holes_[j];
      if (h.x0 <= g.x1 && g.x0 <= h.x1 && h.y0 <= g.y1 && g.y0 <= h.y1)
        throw Error(ErrorKind::domain_violation, "holes overlap");
    }
  }
}

double Domain::diameter() const {
  return std::hypot(outer_.x1 - outer_.x0, outer_.y1 - outer_.y0);
}

bool Domain::contains(Point p) const {
  if (!outer_.contains_closed(p)) return false;
  for (const Rect& h : holes_)
    if (h.contains_open(p)) return false;
  return true;
}

bool Domain::contains(const Segment& s) const {
  if (!contains(s.a) || !contains(s.b)) return false;
  for (const Rect& h : holes_) {
    // An axis-aligned segment enters an open hole iff it crosses its interior box.
    const double x0 = std::min(s.a.x, s.b.x), x1 = std::max(s.a.x, s.b.x);
    const double y0 = std::min(s.a.y, s.b.y), y1 = std::max(s.a.y, s.b.y);
    const bool xin = (x0 == x1) ? (x0 > h.x0 && x0 < h.x1) : (x0 < h.x1 && x1 > h.x0);
    const bool yin = (y0 == y1) ? (y0 > h.y0 && y0 < h.y1) : (y0 < h.y1 && y1 > h.y0);
    if (xin && yin) return false;
  }
  return true;
}

std::vector<Segment> Domain::boundary_segments() const {
  std::vector<Segment> out;
  auto add = [&](const Rect& r) {
    out.push_back({{r.x0, r.y0}, {r.x1, r.y0}});
    out.push_back({{r.x1, r.y0}, {r.x1, r.y1}});
    out.push_back({{r.x1, r.y1}, {r.x0, r.y1}});
    out.push_back({{r.x0, r.y1}, {r.x0, r.y0}});
  };
  add(outer_);
  for (const Rect& h : holes_) add(h);
  return out;
}

bool Domain::on_boundary(Point p) const {
  if (Loop{outer_}.contains(p)) return true;
  for (const Rect& h : holes_)
    if (Loop{h}.contains(p)) return true;
  return false;
}

// ---------------------------------------------------------------- CrackSet

CrackSet::CrackSet(std::vector<Polyline> polylines) : polylines_(std::move(polylines)) {
  for (const Polyline& pl : polylines_) {
    if (pl.vertices.size() < 2)
      throw Error(ErrorKind::invalid_parameters, "polyline needs at least two vertices");
    for (std::size_t i = 0; i + 1 < pl.vertices.size(); ++i) {
      const Point a = pl.vertices[i], b = pl.vertices[i + 1];
      const bool dx = a.x != b.x, dy = a.y != b.y;
      if (dx == dy)
        throw Error(ErrorKind::invalid_parameters,
                    "polyline step " + fmt_point(a) + " -> " + fmt_point(b) +
                        " is not axis-aligned");
    }
  }
}

std::vector<Segment> CrackSet::segments() const {
  std::vector<Segment> out;
  for (const Polyline& pl : polylines_)
    for (std::size_t i = 0; i + 1 < pl.vertices.size(); ++i)
      out.push_back({pl.vertices[i], pl.vertices[i + 1]});
  return out;
}

std::vector<std::pair<Segment, int>> CrackSet::tagged_segments() const {
  std::vector<std::pair<Segment, int>> out;
  for (std::size_t k = 0; k < polylines_.size(); ++k) {
    const auto& v = polylines_[k].vertices;
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
      out.push_back({{v[i], v[i + 1]}, static_cast<int>(k)});
  }
  return out;
}

// ---------------------------------------------------------------- BoundarySpec

BoundarySpec::BoundarySpec(const Domain& domain, std::vector<Segment> dirichlet)
    : dirichlet_(std::move(dirichlet)) {
  if (dirichlet_.empty())
    throw Error(ErrorKind::invalid_parameters, "Dirichlet boundary must be non-empty");
  std::vector<Loop> loops{Loop{domain.outer()}};
  for (const Rect& h : domain.holes()) loops.push_back(Loop{h});

  std::vector<std::vector<std::pair<double, double>>> covered(loops.size());
  for (const Segment& s : dirichlet_) {
    if (s.a.x != s.b.x && s.a.y != s.b.y)
      throw Error(ErrorKind::invalid_parameters, "Dirichlet segment not axis-aligned");
    bool placed = false;
    for (std::size_t l = 0; l < loops.size() && !placed; ++l) {
      const Loop& lp = loops[l];
      if (!lp.contains(s.a) || !lp.contains(s.b)) continue;
      const Point mid{0.5 * (s.a.x + s.b.x), 0.5 * (s.a.y + s.b.y)};
      if (!lp.contains(mid)) continue;
      double s0 = lp.arc(s.a), s1 = lp.arc(s.b);
      if (s0 > s1) std::swap(s0, s1);
      // A segment ending at the lower-left corner from the left side wraps around.
      const double P = lp.perimeter();
      if (s1 - s0 > 0.5 * P && s0 == 0.0) {
        s0 = s1;
        s1 = P;
      }
      covered[l].push_back({s0, s1});
      placed = true;
    }
    if (!placed)
      throw Error(ErrorKind::domain_violation,
                  "Dirichlet segment " + fmt_point(s.a) + " -> " + fmt_point(s.b) +
                      " does not lie on one side of the boundary");
  }

  for (std::size_t l = 0; l < loops.size(); ++l) {
    const Loop& lp = loops[l];
    const double P = lp.perimeter();
    auto iv = covered[l];
    if (iv.empty()) {
      neumann_.push_back(loop_chain(lp, 0.0, P));
      continue;
    }
    std::sort(iv.begin(), iv.end());
    std::vector<std::pair<double, double>> merged;
    for (auto [a, b] : iv) {
      if (!merged.empty() && a <= merged.back().second)
        merged.back().second = std::max(merged.back().second, b);
      else
        merged.push_back({a, b});
    }
    // Gaps between consecutive covered intervals, cyclically.
    for (std::size_t i = 0; i < merged.size(); ++i) {
      const double gap0 = merged[i].second;
      double gap1 = (i + 1 < merged.size()) ? merged[i + 1].first : merged[0].first + P;
      if (gap1 > gap0) neumann_.push_back(loop_chain(lp, gap0, gap1));
    }
  }
}

bool BoundarySpec::on_dirichlet(Point p) const {
  for (const Segment& s : dirichlet_)
    if (on_segment(p, s)) return true;
  return false;
}

bool BoundarySpec::on_neumann(Point p) const {
  if (on_dirichlet(p)) return false;
  for (const auto& arc : neumann_)
    for (const Segment& s : arc)
      if (on_segment(p, s)) return true;
  return false;
}

// ---------------------------------------------------------------- distances

double point_segment_distance(Point p, const Segment& s) {
  const double dx = s.b.x - s.a.x, dy = s.b.y - s.a.y;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((p.x - s.a.x) * dx + (p.y - s.a.y) * dy) / len2, 0.0, 1.0);
  Point c = (t == 1.0) ? s.b : Point{s.a.x + t * dx, s.a.y + t * dy};
  // Axis-aligned segments: clamp exactly so points on the segment give distance 0.
  if (dx == 0.0) {
    c.x = s.a.x;
    c.y = std::clamp(p.y, std::min(s.a.y, s.b.y), std::max(s.a.y, s.b.y));
  }
  if (dy == 0.0) {
    c.y = s.a.y;
    c.x = std::clamp(p.x, std::min(s.a.x, s.b.x), std::max(s.a.x, s.b.x));
  }
  return std::hypot(p.x - c.x, p.y - c.y);
}

double segment_distance(const Segment& s, const Segment& t) {
  if (segments_touch(s, t) && (s.a.x == s.b.x || s.a.y == s.b.y) &&
      (t.a.x == t.b.x || t.a.y == t.b.y))
    return 0.0;
  return std::min({point_segment_distance(s.a, t), point_segment_distance(s.b, t),
                   point_segment_distance(t.a, s), point_segment_distance(t.b, s)});
}

double hausdorff_distance(const CrackSet& a, const CrackSet& b, const Domain& domain) {
  const auto sa = a.segments(), sb = b.segments();
  for (const auto* set : {&sa, &sb})
    for (const Segment& s : *set)
      if (!domain.contains(s))
        throw Error(ErrorKind::domain_violation, "segment " + fmt_point(s.a) + " -> " +
                                                     fmt_point(s.b) + " outside domain");
  if (sa.empty() && sb.empty()) return 0.0;
  if (sa.empty() || sb.empty()) return domain.diameter();
  return std::max(directed_hausdorff(sa, sb), directed_hausdorff(sb, sa));
}

// ---------------------------------------------------------------- components

ComponentPartition connected_components(const CrackSet& k, const BoundarySpec& boundary,
                                        const Domain& domain) {
  (void)domain;
  const int np = static_cast<int>(k.polylines().size());
  const int na = static_cast<int>(boundary.neumann_arcs().size());
  UnionFind uf(np + na);
  std::vector<std::pair<Segment, int>> items = k.tagged_segments();
  for (int a = 0; a < na; ++a)
    for (const Segment& s : boundary.neumann_arcs()[a]) items.push_back({s, np + a});
  for (std::size_t i = 0; i < items.size(); ++i)
    for (std::size_t j = i + 1; j < items.size(); ++j)
      if (items[i].second != items[j].second &&
          segments_touch(items[i].first, items[j].first))
        uf.unite(items[i].second, items[j].second);

  ComponentPartition part;
  std::vector<int> label(np + na, -1);
  auto id_of = [&](int item) {
    const int r = uf.find(item);
    if (label[r] < 0) label[r] = part.count++;
    return label[r];
  };
  for (int i = 0; i < np; ++i) part.polyline_component.push_back(id_of(i));
  for (int a = 0; a < na; ++a) part.arc_component.push_back(id_of(np + a));
  return part;
}

// ---------------------------------------------------------------- example families

Example parse_example(const std::string& id) {
  if (id == "ex5_1") return Example::ex5_1;
  if (id == "ex5_3") return Example::ex5_3;
  if (id == "ex5_5") return Example::ex5_5;
  if (id == "ex5_7") return Example::ex5_7;
  throw Error(ErrorKind::unknown_example, "unknown example id '" + id + "'");
}

std::string to_string(Example e) {
  switch (e) {
    case Example::ex5_1: return "ex5_1";
    case Example::ex5_3: return "ex5_3";
    case Example::ex5_5: return "ex5_5";
    case Example::ex5_7: return "ex5_7";
  }
  return "?";
}

Domain example_domain(Example e) {
  if (e == Example::ex5_5) return Domain({-2, -2, 2, 2}, {Rect{-1, -1, 1, 1}});
  return Domain({-1, -1, 1, 1});
}

BoundarySpec example_boundary(Example e, const Domain& domain) {
  const Rect o = domain.outer();
  std::vector<Segment> d;
  if (e == Example::ex5_1 || e == Example::ex5_3) {
    d.push_back({{o.x0, o.y0}, {o.x1, o.y0}});
    d.push_back({{o.x0, o.y1}, {o.x1, o.y1}});
  } else {
    for (const Segment& s : domain.boundary_segments()) d.push_back(s);
  }
  return BoundarySpec(domain, d);
}

std::pair<double, double> channel_params(Example e, int h, const FamilyParams& params) {
  if (h < 1) throw Error(ErrorKind::invalid_parameters, "h must be >= 1");
  const double b = params.b ? *params.b : std::pow(double(h), -params.b_power);
  double a;
  if (params.a) {
    a = *params.a;
  } else if (params.c > 0) {
    // Keep (1/p) a b^{1-p} equal to c.
    a = params.p * params.c * std::pow(b, params.p - 1.0);
  } else {
    // Vanishing coupling: (1/p) a b^{1-p} = b / p.
    a = std::pow(b, params.p);
  }
  (void)e;
  return {snap(a, params.pitch), snap(b, params.pitch)};
}

CrackSet crack_family(Example e, int h, const FamilyParams& params) {
  if (h < 1) throw Error(ErrorKind::invalid_parameters, "h must be >= 1");
  const double pt = params.pitch;
  switch (e) {
    case Example::ex5_1: {
      const double y = 1.0 / h;
      return CrackSet({line({{-1, y}, {0.5, y}}, pt), line({{-0.5, -y}, {1, -y}}, pt)});
    }
    case Example::ex5_3: {
      auto [a, b] = channel_params(e, h, params);
      if (!(a > 0 && a < 1 && b > 0 && b < 1))
        throw Error(ErrorKind::invalid_parameters,
                    "ex5_3 needs a_h, b_h in (0,1) after snapping");
      return CrackSet({line({{-1, 0}, {-a / 2, 0}}, pt), line({{a / 2, 0}, {1, 0}}, pt),
                       line({{-a / 2, -b / 2}, {-a / 2, b / 2}}, pt),
                       line({{a / 2, -b / 2}, {a / 2, b / 2}}, pt)});
    }
    case Example::ex5_5: {
      auto [a, b] = channel_params(e, h, params);
      if (!(a > 0 && a < 3 && b > 0 && b < 1))
        throw Error(ErrorKind::invalid_parameters,
                    "ex5_5 needs a_h in (0,3) and b_h in (0,1) after snapping");
      const double s = 1.5;
      return CrackSet({line({{-a / 2, s}, {-s, s}, {-s, -s}, {s, -s}, {s, s}, {a / 2, s}}, pt),
                       line({{-a / 2, s - b / 2}, {-a / 2, s + b / 2}}, pt),
                       line({{a / 2, s - b / 2}, {a / 2, s + b / 2}}, pt)});
    }
    case Example::ex5_7: {
      const double g = params.gap ? *params.gap : 1.0 / h;
      const double L = params.arm;
      if (!(g > 0 && g < L && L < 1))
        throw Error(ErrorKind::invalid_parameters, "ex5_7 needs 0 < gap < arm < 1");
      return CrackSet({line({{g, 0}, {L, 0}}, pt), line({{-L, 0}, {-g, 0}}, pt),
                       line({{0, -L}, {0, -g}}, pt)});
    }
  }
  throw Error(ErrorKind::unknown_example, "unknown example");
}

CrackSet crack_limit(Example e, const FamilyParams& params) {
  const double pt = params.pitch;
  switch (e) {
    case Example::ex5_1:
    case Example::ex5_3: return CrackSet({line({{-1, 0}, {1, 0}}, pt)});
    case Example::ex5_5: {
      const double s = 1.5;
      return CrackSet({line({{-s, -s}, {s, -s}, {s, s}, {-s, s}, {-s, -s}}, pt)});
    }
    case Example::ex5_7: {
      const double L = params.arm;
      return CrackSet({line({{0, 0}, {L, 0}}, pt), line({{0, 0}, {-L, 0}}, pt),
                       line({{0, 0}, {0, -L}}, pt)});
    }
  }
  throw Error(ErrorKind::unknown_example, "unknown example");
}

Point contact_point(Example e) {
  if (e == Example::ex5_5) return {0.0, 1.5};
  return {0.0, 0.0};
}

}  // namespace crackdual
