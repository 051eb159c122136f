// Scalar nonlinearity toolbox: truncations, their primitives, cutoffs and
// ramp families, each with value / first / second derivative evaluators and
// declared breakpoints.
#pragma once

#include <functional>
#include <string>
#include <vector>

namespace rplap {

// Clamp to [-k, k].
double t_k(double r, double k);
// a.e. derivative of t_k: indicator of {|r| < k}
double t_k_d1(double r, double k);
// primitive of t_k from 0; equals s^2/2 on |s| <= k
double tilde_t_k(double s, double k);
// T_{k+kp} - T_k
double theta(double r, double k, double kp);
// hat cutoff: 1 on |r|<=l, linear ramp down on (l, l+1), 0 beyond
double h_l(double r, double l);
// ramped truncation: derivative 1 on |r|<=s, linear ramp on (s, s+sigma)
double ts_sigma_value(double r, double s, double sigma);
double ts_sigma_d1(double r, double s, double sigma);
double ts_sigma_d2(double r, double s, double sigma);
// second derivative of the H_k^delta family: 1 / -k*delta / 0 by band
double hk_delta_d2(double r, double k, double delta);

// Which admissibility class a family certifies: second derivative merely
// a.e. (kinked first derivative), piecewise-continuous second derivative,
// or additionally compactly supported first derivative with d1(0) = 0.
enum class FamilyClass { kinked, w2inf, compact_prime };

// A scalar nonlinearity given by value/d1/d2 evaluators. d1 is the a.e.
// derivative of value and d2 of d1, with kinks only at the declared
// breakpoints. If support_radius is finite, d1 vanishes beyond it and the
// value is constant there.
struct ScalarFamily {
  std::string label;
  FamilyClass cls = FamilyClass::w2inf;
  double support_radius = 0.0;  // infinity() if unbounded
  std::vector<double> breakpoints;
  std::function<double(double)> value;
  std::function<double(double)> d1;
  std::function<double(double)> d2;
};

ScalarFamily tk_family(double k);
ScalarFamily tilde_tk_family(double k);
ScalarFamily theta_family(double k, double kp);
ScalarFamily hl_family(double l);
ScalarFamily tssigma_family(double s, double sigma);
// d1(r) = h_l(r) * (T_{k+1}(r) - T_k(r)); compactly supported with d1(0)=0
ScalarFamily compact_s_family(double k, double l);
ScalarFamily hk_delta_family(double k, double delta);

// Parses labels like "tk:1", "theta:1:2", "compact_s:1:3".
ScalarFamily make_family(const std::string& spec);

// Integral of f over [0, r] (signed), split at the breakpoints; exact for
// piecewise polynomials of degree <= 3 between breakpoints.
double integrate_piecewise(const std::function<double(double)>& f,
                           const std::vector<double>& breakpoints, double r);

}  // namespace rplap
