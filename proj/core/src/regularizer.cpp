#include "rplap/regularizer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace rplap {

CutoffProfile build_cutoff(int n, const Mesh& mesh) {
  if (n < 2) throw std::invalid_argument("build_cutoff: n must be >= 2");
  if (1.0 / n < mesh.h)
    throw std::invalid_argument("build_cutoff: level unresolvable (1/n < h)");
  CutoffProfile profile{n, GridFunction(mesh)};
  const double inner = 2.0 / n, outer = 1.0 / n;
  for (int i = 0; i < profile.values.size(); ++i) {
    const double d = mesh.boundary_distance(i);
    double v;
    if (d <= outer)
      v = 0.0;
    else if (d >= inner)
      v = 1.0;
    else
      v = (d - outer) * n;
    profile.values[i] = v;
  }
  return profile;
}

MollifierKernel build_mollifier(int n, const Mesh& mesh) {
  if (n < 2) throw std::invalid_argument("build_mollifier: n must be >= 2");
  if (1.0 / n < mesh.h)
    throw std::invalid_argument("build_mollifier: level unresolvable (1/n < h)");
  const int hw = static_cast<int>(std::floor(1.0 / (n * mesh.h)));
  MollifierKernel kernel{n, hw, std::vector<double>(static_cast<size_t>(2 * hw + 1))};
  double mass = 0.0;
  for (int j = -hw; j <= hw; ++j) {
    const double w = std::max(0.0, 1.0 - std::abs(j) * mesh.h * n);
    kernel.weights[static_cast<size_t>(j + hw)] = w;
    mass += w;
  }
  for (double& w : kernel.weights) w /= mass * mesh.h;
  return kernel;
}

namespace {

// 1D convolution along one axis with zero extension past the boundary.
void convolve_axis(const Mesh& mesh, const MollifierKernel& kernel, int axis,
                   const std::vector<double>& in, std::vector<double>& out) {
  const int n = mesh.n_per_axis;
  const int hw = kernel.half_width;
  const int rows = mesh.dim == 1 ? 1 : n;
  for (int row = 0; row < rows; ++row) {
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int j = -hw; j <= hw; ++j) {
        const int src = i - j;
        if (src < 0 || src >= n) continue;
        const size_t idx = axis == 0 ? static_cast<size_t>(row * n + src)
                                     : static_cast<size_t>(src * n + row);
        acc += kernel.weights[static_cast<size_t>(j + hw)] * in[idx];
      }
      const size_t dst = axis == 0 ? static_cast<size_t>(row * n + i)
                                   : static_cast<size_t>(i * n + row);
      out[dst] = acc * mesh.h;
    }
  }
}

}  // namespace

GridFunction apply_pi_n(const GridFunction& v, int n, const Mesh& mesh) {
  const CutoffProfile cutoff = build_cutoff(n, mesh);
  const MollifierKernel kernel = build_mollifier(n, mesh);
  GridFunction cut(mesh);
  for (int i = 0; i < v.size(); ++i) cut[i] = cutoff.values[i] * v[i];
  GridFunction out(mesh);
  convolve_axis(mesh, kernel, 0, cut.values, out.values);
  if (mesh.dim == 2) {
    GridFunction tmp = out;
    convolve_axis(mesh, kernel, 1, tmp.values, out.values);
  }
  return out;
}

std::vector<ConvergenceRow> pi_n_convergence_report(const GridFunction& v,
                                                    const std::vector<int>& levels,
                                                    double p_seminorm) {
  std::vector<ConvergenceRow> rows;
  for (int n : levels) {
    const GridFunction pv = apply_pi_n(v, n, v.mesh);
    GridFunction diff(v.mesh);
    for (int i = 0; i < v.size(); ++i) diff[i] = pv[i] - v[i];
    rows.push_back({n, "1", norm_lq(diff, 1.0)});
    rows.push_back({n, "2", norm_lq(diff, 2.0)});
    const EdgeField g = discrete_gradient(diff);
    const double vol = std::pow(v.mesh.h, v.mesh.dim);
    double acc = 0.0;
    for (double ge : g.values) acc += std::pow(std::abs(ge), p_seminorm);
    rows.push_back({n, "w1p", std::pow(vol * acc, 1.0 / p_seminorm)});
  }
  return rows;
}

void write_convergence_csv(const std::vector<ConvergenceRow>& rows,
                           const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "n,q,discrepancy\n";
  char buf[64];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof(buf), "%.17g", row.discrepancy);
    out << row.n << ',' << row.metric << ',' << buf << '\n';
  }
}

}  // namespace rplap
