#pragma once

#include <array>
#include <string>
#include <vector>

#include "crackdual/geometry.hpp"

namespace crackdual {

struct GridLines {
  std::vector<double> xs;
  std::vector<double> ys;

  static GridLines uniform(const Rect& r, double resolution);
};

struct Cluster {
  double center;
  double spacing;
};

// Graded axis on [lo, hi] containing every required coordinate. The local spacing is
// min(max_spacing, spacing_k + (ratio - 1) |x - center_k|) over the clusters.
std::vector<double> graded_axis(double lo, double hi, std::vector<double> required,
                                const std::vector<Cluster>& clusters, double max_spacing,
                                double ratio = 1.25);

enum class Side { none, plus, minus, junction };

struct Dof {
  double x = 0, y = 0;
  int node = -1;
  Side side = Side::none;
  int junction_index = 0;
};

std::string side_label(const Dof& d);

struct Cell {
  std::array<int, 3> dof{};
  std::array<int, 3> node{};
  // Edge opposite each vertex, in the uncracked edge numbering.
  std::array<int, 3> edge{};
  double area = 0;
  bool active = true;
  // Gradients of the barycentric coordinates of vertices 1 and 2; vertex 0 is
  // implied, so affine data on a constant field gives exactly zero.
  double g1x = 0, g1y = 0, g2x = 0, g2y = 0;
};

struct Edge {
  int n0 = -1, n1 = -1;
  double mx = 0, my = 0;
  double length = 0;
  bool active = false;
  bool boundary = false;
  bool crack = false;
  bool dirichlet = false;
  // Component of K union the Neumann boundary the edge belongs to, or -1.
  int component = -1;
};

struct CrackFacePair {
  int plus = -1;
  int minus = -1;
  bool contact = false;
};

struct SplitNode {
  int node = -1;
  std::vector<int> dofs;  // ordered counterclockwise from the lowest-angle crack edge
  bool contact = false;
};

class GridMesh {
public:
  int nx = 0, ny = 0;
  std::vector<double> xs, ys;
  std::vector<Dof> dofs;
  std::vector<Cell> cells;
  std::vector<Edge> edges;
  std::vector<char> dirichlet;  // per DOF
  std::vector<CrackFacePair> crack_face_pairs;
  std::vector<SplitNode> split_nodes;
  std::vector<std::vector<int>> node_dofs;  // per grid node
  ComponentPartition partition;
  int crack_edge_count = 0;

  int node_index(int i, int j) const { return j * (nx + 1) + i; }
  int dof_count() const { return static_cast<int>(dofs.size()); }
  int cell_count() const { return static_cast<int>(cells.size()); }
  int edge_count() const { return static_cast<int>(edges.size()); }
  double node_x(int n) const { return xs[n % (nx + 1)]; }
  double node_y(int n) const { return ys[n / (nx + 1)]; }
  // Grid node at p, or -1.
  int find_node(Point p) const;
  // DOFs sitting at p (empty if p is not a node carrying DOFs).
  std::vector<int> dofs_at(Point p) const;
  const SplitNode* split_at(Point p) const;
  double total_area() const;
};

GridMesh build_mesh(const Domain& domain, const CrackSet& k, const BoundarySpec& boundary,
                    double resolution, const std::vector<Point>& contacts = {});
GridMesh build_mesh(const Domain& domain, const CrackSet& k, const BoundarySpec& boundary,
                    const GridLines& lines, const std::vector<Point>& contacts = {});

struct ScalarField {
  std::vector<double> values;
  std::size_t size() const { return values.size(); }
};

struct GradientField {
  std::vector<double> gx, gy;
  std::size_t size() const { return gx.size(); }
};

// Nodal P1 field on the cracked mesh.
GradientField gradient(const GridMesh& mesh, const ScalarField& field);
// Edge-midpoint (Crouzeix-Raviart) field on the uncracked mesh.
GradientField edge_gradient(const GridMesh& mesh, const ScalarField& field);

double lp_distance(const GridMesh& mesh, const GradientField& a, const GradientField& b,
                   double p);
// (sum area |a|^p)^{1/p}
double lp_norm(const GridMesh& mesh, const GradientField& a, double p);

// Integral of a nodal field and of an edge field over the active cells.
double integrate_nodal(const GridMesh& mesh, const ScalarField& field);
double integrate_edge(const GridMesh& mesh, const ScalarField& field);

// Nodal field sampled from a function of position.
template <class F>
ScalarField interpolate(const GridMesh& mesh, F&& f) {
  ScalarField out;
  out.values.reserve(mesh.dofs.size());
  for (const Dof& d : mesh.dofs) out.values.push_back(f(d.x, d.y));
  return out;
}

// Active cell containing p (the first found when p lies on a cell boundary), or -1.
int locate_cell(const GridMesh& mesh, Point p);
// Value of a nodal field at p by linear interpolation on the containing cell.
double evaluate(const GridMesh& mesh, const ScalarField& field, Point p);
// A cell using each DOF (-1 for DOFs of inactive regions only).
std::vector<int> dof_cells(const GridMesh& mesh);

void write_field_csv(const GridMesh& mesh, const ScalarField& field, const std::string& path);
void write_edge_field_csv(const GridMesh& mesh, const ScalarField& field,
                          const std::string& path);

}  // namespace crackdual
