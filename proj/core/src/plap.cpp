#include "rplap/plap.hpp"

#include <cmath>
#include <stdexcept>

namespace rplap {

void PlapParams::validate() const {
  if (!(p > 1.0)) throw std::invalid_argument("PlapParams: p must be > 1");
  if (!(eps >= 0.0)) throw std::invalid_argument("PlapParams: eps must be >= 0");
}

void PlapParams::validate_for_solver() const {
  validate();
  if (p < 2.0 && eps == 0.0)
    throw std::invalid_argument("PlapParams: eps > 0 required for p < 2");
}

double plap_weight(double g, const PlapParams& params) {
  const double s = g * g + params.eps * params.eps;
  if (s == 0.0) {
    if (params.p < 2.0)
      throw std::domain_error("plap_weight: singular weight at zero gradient for p < 2");
    return params.p == 2.0 ? 1.0 : 0.0;
  }
  return std::pow(s, 0.5 * params.p - 1.0);
}

double plap_weight_tangent(double g, const PlapParams& params) {
  const double s = g * g + params.eps * params.eps;
  if (s == 0.0) {
    if (params.p < 2.0)
      throw std::domain_error("plap_weight_tangent: singular weight for p < 2");
    return params.p == 2.0 ? 1.0 : 0.0;
  }
  return std::pow(s, 0.5 * params.p - 2.0) *
         ((params.p - 1.0) * g * g + params.eps * params.eps);
}

GridFunction apply_plap(const GridFunction& u, const PlapParams& params) {
  params.validate();
  EdgeField flux = discrete_gradient(u);
  for (double& g : flux.values) g = plap_weight(g, params) * g;
  GridFunction out = discrete_divergence(flux);
  for (double& v : out.values) v = -v;
  return out;
}

double energy(const GridFunction& u, const PlapParams& params) {
  params.validate();
  const EdgeField g = discrete_gradient(u);
  const double vol = std::pow(u.mesh.h, u.mesh.dim);
  double acc = 0.0;
  for (double ge : g.values)
    acc += std::pow(ge * ge + params.eps * params.eps, 0.5 * params.p);
  return vol * acc / params.p;
}

}  // namespace rplap
