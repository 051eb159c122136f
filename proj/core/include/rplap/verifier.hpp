// Residual evaluators along computed trajectories: the renormalized
// identity, the Ito product rule, the truncation energy and the
// band-dissipation profile. Quadrature conventions are fixed: h^dim node
// sums in space, left-endpoint Riemann/Ito sums in time, and nonlinearities
// on edges evaluated at edge-midpoint averages.
#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rplap/stepper.hpp"
#include "rplap/truncation.hpp"

namespace rplap {

// Closed-form test function with its time derivative and spatial gradient.
struct TestFunctionSpec {
  std::string label;
  bool vanishes_on_boundary = false;
  std::function<double(double t, double x, double y)> value;
  std::function<double(double t, double x, double y)> ddt;
  std::function<double(double t, double x, double y)> ddx;
  std::function<double(double t, double x, double y)> ddy;
};

// Registry: "one", "space_sin", "cos_t_space_sin".
TestFunctionSpec make_test_function(const std::string& spec);

struct InadmissiblePairError : std::runtime_error {
  InadmissiblePairError()
      : std::runtime_error(
            "S'(0) != 0 requires a test function vanishing on the boundary") {}
};
struct InadmissibleZError : std::runtime_error {
  InadmissibleZError() : std::runtime_error("Z(0) = Z'(0) = 0 is required") {}
};
struct MismatchedCouplingError : std::runtime_error {
  explicit MismatchedCouplingError(const std::string& what)
      : std::runtime_error("trajectories are not coupled: " + what) {}
};

// |LHS - RHS| of one identity at one time, with the named per-term
// breakdown it was assembled from.
struct ResidualReport {
  std::string identity;
  double t_eval = 0.0;
  double dt = 0.0, h = 0.0, eps = 0.0;
  std::vector<std::pair<std::string, double>> terms;
  double lhs = 0.0, rhs = 0.0, residual = 0.0;
};

// Renormalized identity for S along traj, tested against psi at t_eval.
ResidualReport renorm_residual(const Trajectory& traj, const ScalarFamily& S,
                               const TestFunctionSpec& psi, double t_eval);

// Ito product rule for (Z(u - v), H(u)) along two trajectories coupled
// through the same mesh, grid, path and noise field.
ResidualReport ito_product_residual(const Trajectory& u_traj,
                                    const Trajectory& v_traj,
                                    const ScalarFamily& H, const ScalarFamily& Z,
                                    double t_eval);

struct TruncationEnergy {
  double energy = 0.0;           // mean of dt*h^dim sums of |grad T_k(u)|^p
  double bound_surrogate = 0.0;  // mean of tilde term + 0.5 * chi * Phi^2 sum
  double std_error = 0.0;        // MC standard error of the energy
};

TruncationEnergy truncation_energy(const std::vector<Trajectory>& ensemble,
                                   double k);

// For each k, MC mean of the p-energy carried by edges whose endpoint
// moduli both lie in (k, k+1); exactly zero above the ensemble sup norm.
std::vector<std::pair<double, double>> dissipation_profile(
    const std::vector<Trajectory>& ensemble, const std::vector<double>& ks);

void write_residual_csv(const std::vector<ResidualReport>& reports,
                        const std::string& path);

}  // namespace rplap
