#include "rplap/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rplap {

Mesh::Mesh(int dim_, int n_per_axis_) : dim(dim_), n_per_axis(n_per_axis_) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("Mesh: dim must be 1 or 2");
  if (n_per_axis < 1) throw std::invalid_argument("Mesh: n_per_axis must be >= 1");
  h = 1.0 / (n_per_axis + 1);
}

int Mesh::n_nodes() const {
  return dim == 1 ? n_per_axis : n_per_axis * n_per_axis;
}

int Mesh::n_edges() const {
  const int n = n_per_axis;
  return dim == 1 ? n + 1 : 2 * (n + 1) * n;
}

std::array<double, 2> Mesh::node_coord(int node) const {
  if (dim == 1) return {(node + 1) * h, 0.0};
  const int ix = node % n_per_axis;
  const int iy = node / n_per_axis;
  return {(ix + 1) * h, (iy + 1) * h};
}

double Mesh::boundary_distance(int node) const {
  const auto c = node_coord(node);
  double d = std::min(c[0], 1.0 - c[0]);
  if (dim == 2) d = std::min({d, c[1], 1.0 - c[1]});
  return d;
}

bool operator==(const Mesh& a, const Mesh& b) {
  return a.dim == b.dim && a.n_per_axis == b.n_per_axis;
}

std::vector<GridEdge> make_edges(const Mesh& mesh) {
  const int n = mesh.n_per_axis;
  std::vector<GridEdge> edges;
  edges.reserve(static_cast<size_t>(mesh.n_edges()));
  if (mesh.dim == 1) {
    for (int i = 0; i <= n; ++i)
      edges.push_back({i == 0 ? -1 : i - 1, i == n ? -1 : i, 0});
    return edges;
  }
  auto node = [n](int ix, int iy) { return iy * n + ix; };
  for (int iy = 0; iy < n; ++iy)
    for (int i = 0; i <= n; ++i)
      edges.push_back({i == 0 ? -1 : node(i - 1, iy), i == n ? -1 : node(i, iy), 0});
  for (int ix = 0; ix < n; ++ix)
    for (int j = 0; j <= n; ++j)
      edges.push_back({j == 0 ? -1 : node(ix, j - 1), j == n ? -1 : node(ix, j), 1});
  return edges;
}

EdgeField discrete_gradient(const GridFunction& u) {
  EdgeField g(u.mesh);
  const auto edges = make_edges(u.mesh);
  const double inv_h = 1.0 / u.mesh.h;
  for (size_t e = 0; e < edges.size(); ++e) {
    const double va = edges[e].a < 0 ? 0.0 : u[edges[e].a];
    const double vb = edges[e].b < 0 ? 0.0 : u[edges[e].b];
    g.values[e] = (vb - va) * inv_h;
  }
  return g;
}

GridFunction discrete_divergence(const EdgeField& F) {
  GridFunction d(F.mesh);
  const auto edges = make_edges(F.mesh);
  const double inv_h = 1.0 / F.mesh.h;
  for (size_t e = 0; e < edges.size(); ++e) {
    if (edges[e].a >= 0) d[edges[e].a] += F.values[e] * inv_h;
    if (edges[e].b >= 0) d[edges[e].b] -= F.values[e] * inv_h;
  }
  return d;
}

double norm_lq(const GridFunction& u, double q) {
  if (q < 1.0) throw std::invalid_argument("norm_lq: q must be >= 1");
  const double vol = std::pow(u.mesh.h, u.mesh.dim);
  double s = 0.0;
  for (double v : u.values) s += std::pow(std::abs(v), q);
  return std::pow(vol * s, 1.0 / q);
}

double norm_sup(const GridFunction& u) {
  double m = 0.0;
  for (double v : u.values) m = std::max(m, std::abs(v));
  return m;
}

double inner_nodes(const GridFunction& u, const GridFunction& v) {
  const double vol = std::pow(u.mesh.h, u.mesh.dim);
  double s = 0.0;
  for (size_t i = 0; i < u.values.size(); ++i) s += u.values[i] * v.values[i];
  return vol * s;
}

double inner_edges(const EdgeField& F, const EdgeField& G) {
  const double vol = std::pow(F.mesh.h, F.mesh.dim);
  double s = 0.0;
  for (size_t i = 0; i < F.values.size(); ++i) s += F.values[i] * G.values[i];
  return vol * s;
}

bool all_finite(const GridFunction& u) {
  return std::all_of(u.values.begin(), u.values.end(),
                     [](double v) { return std::isfinite(v); });
}

}  // namespace rplap
