#include "crackdual/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <numeric>
#include <sstream>

#include "crackdual/errors.hpp"
#include "crackdual/kernels.hpp"

namespace crackdual {

GridLines GridLines::uniform(const Rect& r, double resolution) {
  if (!(resolution > 0)) throw Error(ErrorKind::resolution, "resolution must be positive");
  auto axis = [&](double lo, double hi) {
    const double cells = (hi - lo) * resolution;
    const long n = std::lround(cells);
    if (n < 1 || std::abs(cells - n) > 1e-9 * std::max(1.0, cells))
      throw Error(ErrorKind::resolution, "domain side is not a whole number of cells");
    std::vector<double> v(n + 1);
    for (long i = 0; i <= n; ++i) v[i] = lo + (hi - lo) * static_cast<double>(i) / n;
    v[0] = lo;
    v[n] = hi;
    return v;
  };
  return {axis(r.x0, r.x1), axis(r.y0, r.y1)};
}

std::vector<double> graded_axis(double lo, double hi, std::vector<double> required,
                                const std::vector<Cluster>& clusters, double max_spacing,
                                double ratio) {
  required.push_back(lo);
  required.push_back(hi);
  std::sort(required.begin(), required.end());
  required.erase(std::unique(required.begin(), required.end()), required.end());
  auto spacing = [&](double x) {
    double s = max_spacing;
    for (const Cluster& c : clusters)
      s = std::min(s, c.spacing + (ratio - 1.0) * std::abs(x - c.center));
    return s;
  };
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < required.size(); ++i) {
    const double a = required[i], b = required[i + 1];
    if (a < lo || b > hi) continue;
    out.push_back(a);
    double x = a;
    while (true) {
      double s = spacing(x);
      s = std::min(s, spacing(x + s));
      s = std::min(s, spacing(x + s));
      if (x + 1.5 * s >= b) {
        // Split the remainder into one or two steps.
        if (b - x > 1.25 * s) out.push_back(0.5 * (x + b));
        break;
      }
      x += s;
      out.push_back(x);
    }
  }
  out.push_back(required.back());
  return out;
}

std::string side_label(const Dof& d) {
  switch (d.side) {
    case Side::none: return "none";
    case Side::plus: return "plus";
    case Side::minus: return "minus";
    case Side::junction: return "junction_" + std::to_string(d.junction_index);
  }
  return "none";
}

int GridMesh::find_node(Point p) const {
  auto locate = [](const std::vector<double>& v, double x) {
    auto it = std::lower_bound(v.begin(), v.end(), x);
    const double tol = 1e-12 * std::max(1.0, std::abs(v.back() - v.front()));
    if (it != v.end() && std::abs(*it - x) <= tol) return static_cast<int>(it - v.begin());
    if (it != v.begin() && std::abs(*(it - 1) - x) <= tol)
      return static_cast<int>(it - v.begin()) - 1;
    return -1;
  };
  const int i = locate(xs, p.x), j = locate(ys, p.y);
  if (i < 0 || j < 0) return -1;
  return node_index(i, j);
}

std::vector<int> GridMesh::dofs_at(Point p) const {
  const int n = find_node(p);
  if (n < 0) return {};
  return node_dofs[n];
}

const SplitNode* GridMesh::split_at(Point p) const {
  const int n = find_node(p);
  for (const SplitNode& s : split_nodes)
    if (s.node == n) return &s;
  return nullptr;
}

double GridMesh::total_area() const {
  double a = 0;
  for (const Cell& c : cells)
    if (c.active) a += c.area;
  return a;
}

namespace {

int locate_line(const std::vector<double>& v, double x, const char* what) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  const double tol = 1e-10 * std::max(1.0, std::abs(v.back() - v.front()));
  if (it != v.end() && std::abs(*it - x) <= tol) return static_cast<int>(it - v.begin());
  if (it != v.begin() && std::abs(*(it - 1) - x) <= tol)
    return static_cast<int>(it - v.begin()) - 1;
  std::ostringstream os;
  os << what << " coordinate " << x << " is not on a grid line";
  throw Error(ErrorKind::resolution, os.str());
}

struct LocalUF {
  int p[8];
  int find(int i) {
    while (p[i] != i) i = p[i] = p[p[i]];
    return i;
  }
};

}  // namespace

GridMesh build_mesh(const Domain& domain, const CrackSet& k, const BoundarySpec& boundary,
                    double resolution, const std::vector<Point>& contacts) {
  return build_mesh(domain, k, boundary, GridLines::uniform(domain.outer(), resolution),
                    contacts);
}

GridMesh build_mesh(const Domain& domain, const CrackSet& k, const BoundarySpec& boundary,
                    const GridLines& lines, const std::vector<Point>& contacts) {
  GridMesh m;
  m.xs = lines.xs;
  m.ys = lines.ys;
  m.nx = static_cast<int>(m.xs.size()) - 1;
  m.ny = static_cast<int>(m.ys.size()) - 1;
  if (m.nx < 1 || m.ny < 1) throw Error(ErrorKind::resolution, "grid needs at least one cell");
  const Rect o = domain.outer();
  if (m.xs.front() != o.x0 || m.xs.back() != o.x1 || m.ys.front() != o.y0 ||
      m.ys.back() != o.y1)
    throw Error(ErrorKind::resolution, "grid lines do not span the outer rectangle");
  for (const Rect& h : domain.holes()) {
    locate_line(m.xs, h.x0, "hole");
    locate_line(m.xs, h.x1, "hole");
    locate_line(m.ys, h.y0, "hole");
    locate_line(m.ys, h.y1, "hole");
  }
  const int nx = m.nx, ny = m.ny;
  const int n_nodes = (nx + 1) * (ny + 1);
  const int H = nx * (ny + 1), V = (nx + 1) * ny;
  auto hedge = [&](int i, int j) { return j * nx + i; };
  auto vedge = [&](int i, int j) { return H + j * (nx + 1) + i; };
  auto dedge = [&](int i, int j) { return H + V + j * nx + i; };
  // Edge joining two grid nodes of one cell.
  auto edge_of = [&](int a, int b) {
    const int ia = a % (nx + 1), ja = a / (nx + 1), ib = b % (nx + 1), jb = b / (nx + 1);
    if (ja == jb) return hedge(std::min(ia, ib), ja);
    if (ia == ib) return vedge(ia, std::min(ja, jb));
    return dedge(std::min(ia, ib), std::min(ja, jb));
  };

  // Crack edges.
  const auto tagged = k.tagged_segments();
  m.edges.resize(H + V + nx * ny);
  std::vector<int> edge_polyline(m.edges.size(), -1);
  for (const auto& [s, poly] : tagged) {
    if (!domain.contains(s))
      throw Error(ErrorKind::domain_violation, "crack segment leaves the domain");
    if (s.a.y == s.b.y) {
      const int j = locate_line(m.ys, s.a.y, "crack");
      int i0 = locate_line(m.xs, s.a.x, "crack"), i1 = locate_line(m.xs, s.b.x, "crack");
      if (i0 > i1) std::swap(i0, i1);
      for (int i = i0; i < i1; ++i) edge_polyline[hedge(i, j)] = poly;
    } else {
      const int i = locate_line(m.xs, s.a.x, "crack");
      int j0 = locate_line(m.ys, s.a.y, "crack"), j1 = locate_line(m.ys, s.b.y, "crack");
      if (j0 > j1) std::swap(j0, j1);
      for (int j = j0; j < j1; ++j) edge_polyline[vedge(i, j)] = poly;
    }
  }

  // Triangles.
  m.cells.resize(2 * nx * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int n00 = m.node_index(i, j), n10 = m.node_index(i + 1, j);
      const int n01 = m.node_index(i, j + 1), n11 = m.node_index(i + 1, j + 1);
      const double cx = 0.5 * (m.xs[i] + m.xs[i + 1]), cy = 0.5 * (m.ys[j] + m.ys[j + 1]);
      bool active = true;
      for (const Rect& h : domain.holes())
        if (h.contains_open({cx, cy})) active = false;
      std::array<std::array<int, 3>, 2> tri;
      if ((i + j) % 2 == 0)
        tri = {{{n00, n10, n11}, {n00, n11, n01}}};
      else
        tri = {{{n00, n10, n01}, {n10, n11, n01}}};
      for (int t = 0; t < 2; ++t) {
        Cell& c = m.cells[2 * (j * nx + i) + t];
        c.node = tri[t];
        c.active = active;
        const double x0 = m.node_x(c.node[0]), y0 = m.node_y(c.node[0]);
        const double d11 = m.node_x(c.node[1]) - x0, d21 = m.node_y(c.node[1]) - y0;
        const double d12 = m.node_x(c.node[2]) - x0, d22 = m.node_y(c.node[2]) - y0;
        const double det = d11 * d22 - d12 * d21;
        c.area = 0.5 * det;
        c.g1x = d22 / det;
        c.g1y = -d12 / det;
        c.g2x = -d21 / det;
        c.g2y = d11 / det;
        for (int a = 0; a < 3; ++a) c.edge[a] = edge_of(c.node[(a + 1) % 3], c.node[(a + 2) % 3]);
      }
    }
  }

  // Incident active triangles per node.
  std::vector<int> start(n_nodes + 1, 0);
  for (const Cell& c : m.cells)
    if (c.active)
      for (int n : c.node) ++start[n + 1];
  std::partial_sum(start.begin(), start.end(), start.begin());
  std::vector<int> inc(start.back());
  {
    std::vector<int> fill(start.begin(), start.end() - 1);
    for (int t = 0; t < m.cell_count(); ++t)
      if (m.cells[t].active)
        for (int n : m.cells[t].node) inc[fill[n]++] = t;
  }

  // Sector DOFs.
  m.node_dofs.assign(n_nodes, {});
  const double two_pi = 2.0 * std::numbers::pi;
  for (int n = 0; n < n_nodes; ++n) {
    const int cnt = start[n + 1] - start[n];
    if (cnt == 0) continue;
    const int* T = inc.data() + start[n];
    LocalUF uf;
    for (int a = 0; a < cnt; ++a) uf.p[a] = a;
    std::vector<int> cut_dirs_edges;
    for (int a = 0; a < cnt; ++a) {
      for (int b = a + 1; b < cnt; ++b) {
        for (int va : m.cells[T[a]].node) {
          if (va == n) continue;
          bool shared = false;
          for (int vb : m.cells[T[b]].node) shared |= (vb == va);
          if (shared && edge_polyline[edge_of(n, va)] < 0) {
            const int ra = uf.find(a), rb = uf.find(b);
            if (ra != rb) uf.p[std::max(ra, rb)] = std::min(ra, rb);
          }
        }
      }
    }
    const double px = m.node_x(n), py = m.node_y(n);
    // Lowest angle of an incident crack edge.
    double theta0 = 0.0;
    bool any_cut = false;
    {
      const int i = n % (nx + 1), j = n / (nx + 1);
      std::vector<std::pair<int, double>> cand;
      if (i + 1 <= nx) cand.push_back({hedge(i, j), 0.0});
      if (j + 1 <= ny) cand.push_back({vedge(i, j), 0.5 * std::numbers::pi});
      if (i - 1 >= 0) cand.push_back({hedge(i - 1, j), std::numbers::pi});
      if (j - 1 >= 0) cand.push_back({vedge(i, j - 1), 1.5 * std::numbers::pi});
      int n_cut = 0;
      for (auto [e, ang] : cand) {
        if (edge_polyline[e] >= 0) {
          theta0 = any_cut ? std::min(theta0, ang) : ang;
          any_cut = true;
          ++n_cut;
        }
      }
      // A lone crack edge (endpoint on the boundary) keeps the orientation of its segment.
      if (n_cut == 1 && theta0 >= std::numbers::pi) theta0 -= std::numbers::pi;
    }
    std::vector<int> roots;
    std::vector<double> key;
    for (int a = 0; a < cnt; ++a) {
      const Cell& c = m.cells[T[a]];
      double gx = 0, gy = 0;
      for (int v : c.node) {
        gx += m.node_x(v) / 3.0;
        gy += m.node_y(v) / 3.0;
      }
      double ang = std::atan2(gy - py, gx - px) - theta0;
      while (ang < 0) ang += two_pi;
      while (ang >= two_pi) ang -= two_pi;
      const int r = uf.find(a);
      auto it = std::find(roots.begin(), roots.end(), r);
      if (it == roots.end()) {
        roots.push_back(r);
        key.push_back(ang);
      } else {
        double& kk = key[it - roots.begin()];
        kk = std::min(kk, ang);
      }
    }
    std::vector<int> order(roots.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return key[a] < key[b]; });
    const int groups = static_cast<int>(roots.size());
    for (int g = 0; g < groups; ++g) {
      Dof d;
      d.x = px;
      d.y = py;
      d.node = n;
      if (groups == 2)
        d.side = (g == 0) ? Side::plus : Side::minus;
      else if (groups > 2) {
        d.side = Side::junction;
        d.junction_index = g;
      }
      const int id = m.dof_count();
      m.dofs.push_back(d);
      m.node_dofs[n].push_back(id);
      const int root = roots[order[g]];
      for (int a = 0; a < cnt; ++a) {
        if (uf.find(a) != root) continue;
        Cell& c = m.cells[T[a]];
        for (int v = 0; v < 3; ++v)
          if (c.node[v] == n) c.dof[v] = id;
      }
    }
    if (groups >= 2) {
      SplitNode s;
      s.node = n;
      s.dofs = m.node_dofs[n];
      for (Point c : contacts)
        if (c.x == px && c.y == py) s.contact = true;
      if (groups == 2) m.crack_face_pairs.push_back({s.dofs[0], s.dofs[1], s.contact});
      m.split_nodes.push_back(std::move(s));
    }
  }
  for (Point c : contacts) {
    const int n = m.find_node(c);
    if (n < 0) throw Error(ErrorKind::resolution, "contact point is not a grid node");
  }

  // Dirichlet DOFs: on the closed Dirichlet arcs, off K.
  const auto segs = k.segments();
  m.dirichlet.assign(m.dofs.size(), 0);
  for (std::size_t d = 0; d < m.dofs.size(); ++d) {
    const Point p{m.dofs[d].x, m.dofs[d].y};
    if (!boundary.on_dirichlet(p)) continue;
    bool on_k = false;
    for (const Segment& s : segs) on_k |= point_segment_distance(p, s) == 0.0;
    if (!on_k) m.dirichlet[d] = 1;
  }

  // Uncracked edge space.
  m.partition = connected_components(k, boundary, domain);
  std::vector<int> edge_cells(m.edges.size(), 0);
  for (const Cell& c : m.cells)
    if (c.active)
      for (int e : c.edge) ++edge_cells[e];
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i < nx; ++i) {
      Edge& e = m.edges[hedge(i, j)];
      e.n0 = m.node_index(i, j);
      e.n1 = m.node_index(i + 1, j);
    }
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      Edge& e = m.edges[vedge(i, j)];
      e.n0 = m.node_index(i, j);
      e.n1 = m.node_index(i, j + 1);
    }
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      Edge& e = m.edges[dedge(i, j)];
      if ((i + j) % 2 == 0) {
        e.n0 = m.node_index(i, j);
        e.n1 = m.node_index(i + 1, j + 1);
      } else {
        e.n0 = m.node_index(i + 1, j);
        e.n1 = m.node_index(i, j + 1);
      }
    }
  const auto& arcs = boundary.neumann_arcs();
  for (std::size_t id = 0; id < m.edges.size(); ++id) {
    Edge& e = m.edges[id];
    e.mx = 0.5 * (m.node_x(e.n0) + m.node_x(e.n1));
    e.my = 0.5 * (m.node_y(e.n0) + m.node_y(e.n1));
    e.length = std::hypot(m.node_x(e.n1) - m.node_x(e.n0), m.node_y(e.n1) - m.node_y(e.n0));
    e.active = edge_cells[id] > 0;
    e.boundary = edge_cells[id] == 1;
    if (edge_polyline[id] >= 0) {
      e.crack = true;
      ++m.crack_edge_count;
      e.component = m.partition.polyline_component[edge_polyline[id]];
      continue;
    }
    if (!e.boundary) continue;
    const Point mid{e.mx, e.my};
    if (boundary.on_dirichlet(mid)) {
      e.dirichlet = true;
      continue;
    }
    for (std::size_t a = 0; a < arcs.size() && e.component < 0; ++a)
      for (const Segment& s : arcs[a])
        if (point_segment_distance(mid, s) == 0.0) {
          e.component = m.partition.arc_component[a];
          break;
        }
  }
  return m;
}

GradientField gradient(const GridMesh& mesh, const ScalarField& field) {
  if (field.size() != mesh.dofs.size())
    throw Error(ErrorKind::size_mismatch, "field length does not match the DOF count");
  GradientField g;
  g.gx.assign(mesh.cells.size(), 0.0);
  g.gy.assign(mesh.cells.size(), 0.0);
  const double* u = field.values.data();
  for (std::size_t t = 0; t < mesh.cells.size(); ++t) {
    const Cell& c = mesh.cells[t];
    if (!c.active) continue;
    const double d1 = u[c.dof[1]] - u[c.dof[0]], d2 = u[c.dof[2]] - u[c.dof[0]];
    g.gx[t] = c.g1x * d1 + c.g2x * d2;
    g.gy[t] = c.g1y * d1 + c.g2y * d2;
  }
  return g;
}

GradientField edge_gradient(const GridMesh& mesh, const ScalarField& field) {
  if (field.size() != mesh.edges.size())
    throw Error(ErrorKind::size_mismatch, "edge field length does not match the edge count");
  GradientField g;
  g.gx.assign(mesh.cells.size(), 0.0);
  g.gy.assign(mesh.cells.size(), 0.0);
  const double* v = field.values.data();
  for (std::size_t t = 0; t < mesh.cells.size(); ++t) {
    const Cell& c = mesh.cells[t];
    if (!c.active) continue;
    // Basis 1 - 2 lambda_a at the edge opposite vertex a.
    const double d1 = v[c.edge[1]] - v[c.edge[0]], d2 = v[c.edge[2]] - v[c.edge[0]];
    g.gx[t] = -2.0 * (c.g1x * d1 + c.g2x * d2);
    g.gy[t] = -2.0 * (c.g1y * d1 + c.g2y * d2);
  }
  return g;
}

double lp_distance(const GridMesh& mesh, const GradientField& a, const GradientField& b,
                   double p) {
  if (a.size() != mesh.cells.size() || b.size() != mesh.cells.size())
    throw Error(ErrorKind::size_mismatch, "gradient fields do not match the mesh");
  if (!(p > 1.0) || !std::isfinite(p)) throw Error(ErrorKind::invalid_p, "p must lie in (1, inf)");
  const std::size_t n = mesh.cells.size();
  std::vector<double> dx(n), dy(n), w(n);
  for (std::size_t t = 0; t < n; ++t) {
    dx[t] = a.gx[t] - b.gx[t];
    dy[t] = a.gy[t] - b.gy[t];
    w[t] = mesh.cells[t].active ? mesh.cells[t].area : 0.0;
  }
  return std::pow(kernels::power_sum(dx, dy, w, p), 1.0 / p);
}

double lp_norm(const GridMesh& mesh, const GradientField& a, double p) {
  GradientField zero;
  zero.gx.assign(a.size(), 0.0);
  zero.gy.assign(a.size(), 0.0);
  return lp_distance(mesh, a, zero, p);
}

double integrate_nodal(const GridMesh& mesh, const ScalarField& field) {
  if (field.size() != mesh.dofs.size())
    throw Error(ErrorKind::size_mismatch, "field length does not match the DOF count");
  double s = 0;
  for (const Cell& c : mesh.cells)
    if (c.active)
      s += c.area * (field.values[c.dof[0]] + field.values[c.dof[1]] + field.values[c.dof[2]]) /
           3.0;
  return s;
}

double integrate_edge(const GridMesh& mesh, const ScalarField& field) {
  if (field.size() != mesh.edges.size())
    throw Error(ErrorKind::size_mismatch, "edge field length does not match the edge count");
  double s = 0;
  for (const Cell& c : mesh.cells)
    if (c.active)
      s += c.area *
           (field.values[c.edge[0]] + field.values[c.edge[1]] + field.values[c.edge[2]]) / 3.0;
  return s;
}

int locate_cell(const GridMesh& mesh, Point p) {
  auto bracket = [](const std::vector<double>& v, double x) {
    if (x < v.front() || x > v.back()) return -1;
    auto it = std::upper_bound(v.begin(), v.end(), x);
    int i = static_cast<int>(it - v.begin()) - 1;
    return std::min(i, static_cast<int>(v.size()) - 2);
  };
  const int i = bracket(mesh.xs, p.x), j = bracket(mesh.ys, p.y);
  if (i < 0 || j < 0) return -1;
  int best = -1;
  double best_min = -INFINITY;
  for (int t = 0; t < 2; ++t) {
    const int id = 2 * (j * mesh.nx + i) + t;
    const Cell& c = mesh.cells[id];
    if (!c.active) continue;
    const double x0 = mesh.node_x(c.node[0]), y0 = mesh.node_y(c.node[0]);
    const double l1 = c.g1x * (p.x - x0) + c.g1y * (p.y - y0);
    const double l2 = c.g2x * (p.x - x0) + c.g2y * (p.y - y0);
    const double lo = std::min({1.0 - l1 - l2, l1, l2});
    if (lo > best_min) {
      best_min = lo;
      best = id;
    }
  }
  return best;
}

double evaluate(const GridMesh& mesh, const ScalarField& field, Point p) {
  const int t = locate_cell(mesh, p);
  if (t < 0) throw Error(ErrorKind::domain_violation, "evaluation point outside the mesh");
  const Cell& c = mesh.cells[t];
  const double x0 = mesh.node_x(c.node[0]), y0 = mesh.node_y(c.node[0]);
  const double l1 = c.g1x * (p.x - x0) + c.g1y * (p.y - y0);
  const double l2 = c.g2x * (p.x - x0) + c.g2y * (p.y - y0);
  return (1.0 - l1 - l2) * field.values[c.dof[0]] + l1 * field.values[c.dof[1]] +
         l2 * field.values[c.dof[2]];
}

std::vector<int> dof_cells(const GridMesh& mesh) {
  std::vector<int> out(mesh.dofs.size(), -1);
  for (int t = 0; t < mesh.cell_count(); ++t) {
    const Cell& c = mesh.cells[t];
    if (!c.active) continue;
    for (int d : c.dof)
      if (out[d] < 0) out[d] = t;
  }
  return out;
}

void write_field_csv(const GridMesh& mesh, const ScalarField& field, const std::string& path) {
  if (field.size() != mesh.dofs.size())
    throw Error(ErrorKind::size_mismatch, "field length does not match the DOF count");
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::config, "cannot write " + path);
  os << "x,y,dof_id,side,value\n" << std::setprecision(17);
  for (std::size_t d = 0; d < mesh.dofs.size(); ++d)
    os << mesh.dofs[d].x << ',' << mesh.dofs[d].y << ',' << d << ',' << side_label(mesh.dofs[d])
       << ',' << field.values[d] << '\n';
}

void write_edge_field_csv(const GridMesh& mesh, const ScalarField& field,
                          const std::string& path) {
  if (field.size() != mesh.edges.size())
    throw Error(ErrorKind::size_mismatch, "edge field length does not match the edge count");
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::config, "cannot write " + path);
  os << "x,y,dof_id,side,value\n" << std::setprecision(17);
  for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
    if (!mesh.edges[e].active) continue;
    os << mesh.edges[e].mx << ',' << mesh.edges[e].my << ',' << e << ",none,"
       << field.values[e] << '\n';
  }
}

}  // namespace crackdual
