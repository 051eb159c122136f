// Regularizing operators: boundary cutoff times mollification,
// Pi_n(v) = (phi_n . v) * rho_n, with the boundedness/convergence reports
// used to audit them.
#pragma once

#include <string>
#include <vector>

#include "rplap/grid.hpp"

namespace rplap {

// phi_n at the interior nodes: 0 within boundary distance 1/n, 1 beyond
// 2/n, linear ramp in between (slope n <= 2n).
struct CutoffProfile {
  int n = 0;
  GridFunction values;
};

// Symmetric nonnegative per-axis weights with support in [-1/n, 1/n],
// normalized to unit mass under the h-scaling (tensorized in 2D).
struct MollifierKernel {
  int n = 0;
  int half_width = 0;            // in nodes
  std::vector<double> weights;   // size 2*half_width + 1
};

// Rejects levels the mesh cannot resolve (1/n < h).
CutoffProfile build_cutoff(int n, const Mesh& mesh);
MollifierKernel build_mollifier(int n, const Mesh& mesh);

// Discrete convolution of (phi_n . v) with the mollifier, zero-extended
// across the boundary; linear in v.
GridFunction apply_pi_n(const GridFunction& v, int n, const Mesh& mesh);

struct ConvergenceRow {
  int n;
  std::string metric;  // "1", "2", or "w1p"
  double discrepancy;
};

// ||Pi_n v - v|| per level in the L^1 and L^2 norms plus the discrete
// W^{1,p} seminorm.
std::vector<ConvergenceRow> pi_n_convergence_report(const GridFunction& v,
                                                    const std::vector<int>& levels,
                                                    double p_seminorm = 2.0);

void write_convergence_csv(const std::vector<ConvergenceRow>& rows,
                           const std::string& path);

}  // namespace rplap
