// Uniform grid over the unit interval / unit square with homogeneous
// Dirichlet boundary, plus the discrete gradient/divergence calculus and
// the h-weighted norms everything else is built on.
#pragma once

#include <array>
#include <vector>

namespace rplap {

// Only interior nodes carry unknowns; boundary values are an implicit zero.
// Nodes are ordered lexicographically, row-major in 2D (x fastest).
struct Mesh {
  int dim = 1;
  int n_per_axis = 1;
  double h = 0.5;  // h * (n_per_axis + 1) == 1

  Mesh() = default;
  Mesh(int dim_, int n_per_axis_);

  int n_nodes() const;
  int n_edges() const;

  // physical coordinates of an interior node ({x, 0} in 1D)
  std::array<double, 2> node_coord(int node) const;
  double boundary_distance(int node) const;
};

bool operator==(const Mesh& a, const Mesh& b);

// One real value per interior node.
struct GridFunction {
  Mesh mesh;
  std::vector<double> values;

  GridFunction() = default;
  explicit GridFunction(const Mesh& m, double fill = 0.0)
      : mesh(m), values(static_cast<size_t>(m.n_nodes()), fill) {}

  double& operator[](int i) { return values[static_cast<size_t>(i)]; }
  double operator[](int i) const { return values[static_cast<size_t>(i)]; }
  int size() const { return static_cast<int>(values.size()); }
};

// One real value per axis-aligned edge; edges connect neighbor nodes or an
// interior node to the boundary. Axis-0 edges first, then axis-1.
struct EdgeField {
  Mesh mesh;
  std::vector<double> values;

  EdgeField() = default;
  explicit EdgeField(const Mesh& m, double fill = 0.0)
      : mesh(m), values(static_cast<size_t>(m.n_edges()), fill) {}

  double& operator[](int i) { return values[static_cast<size_t>(i)]; }
  double operator[](int i) const { return values[static_cast<size_t>(i)]; }
  int size() const { return static_cast<int>(values.size()); }
};

// Oriented edge from the lower-coordinate endpoint a to the upper one b;
// -1 marks a boundary endpoint (value 0).
struct GridEdge {
  int a;
  int b;
  int axis;
};

// Edge table in the fixed edge order used by EdgeField.
std::vector<GridEdge> make_edges(const Mesh& mesh);

// Difference quotients (b - a)/h with zero boundary values.
EdgeField discrete_gradient(const GridFunction& u);

// Negative adjoint of discrete_gradient under the h-weighted inner
// products: <div F, u>_nodes = -<F, grad u>_edges exactly.
GridFunction discrete_divergence(const EdgeField& F);

// (h^dim * sum |u_i|^q)^(1/q); rejects q < 1.
double norm_lq(const GridFunction& u, double q);
double norm_sup(const GridFunction& u);

// h-weighted inner products over nodes and edges.
double inner_nodes(const GridFunction& u, const GridFunction& v);
double inner_edges(const EdgeField& F, const EdgeField& G);

bool all_finite(const GridFunction& u);

}  // namespace rplap
