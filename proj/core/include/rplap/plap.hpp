// Discrete p-Laplace operator A_h(u) = -div(m(grad u) . grad u) with the
// edge weight m(g) = (g^2 + eps^2)^((p-2)/2), and the convex energy whose
// gradient it is.
#pragma once

#include "rplap/grid.hpp"

namespace rplap {

struct PlapParams {
  double p = 2.0;
  double eps = 0.0;  // smoothing for the singular case p < 2

  void validate() const;           // p > 1, eps >= 0
  void validate_for_solver() const;  // additionally eps > 0 when p < 2
};

// Per-edge flux weight (g^2 + eps^2)^((p-2)/2). Throws for p < 2, eps = 0,
// g = 0 (singular weight).
double plap_weight(double g, const PlapParams& params);

// Derivative d/dg [m(g) g]; nonnegative for p > 1.
double plap_weight_tangent(double g, const PlapParams& params);

// A_h(u); for p = 2, eps = 0 this is exactly the 3-/5-point Dirichlet
// Laplacian stencil.
GridFunction apply_plap(const GridFunction& u, const PlapParams& params);

// E(u) = h^dim * sum_edges (1/p) (g_e^2 + eps^2)^(p/2); strictly convex,
// node gradient equals h^dim * apply_plap(u).
double energy(const GridFunction& u, const PlapParams& params);

}  // namespace rplap
