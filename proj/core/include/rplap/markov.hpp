// Monte Carlo checks of the flow/semigroup structure: pathwise contraction,
// flow composition, Chapman-Kolmogorov, time homogeneity and the
// e-property. Sample substreams are derived from the master seed by a fixed
// splitting rule tagged with the window's absolute start step, so
// identically configured estimators share paths and everything is a pure
// function of (config, master seed). Sample paths run concurrently with
// pre-derived seeds and are aggregated in index order.
//
// The conditional-expectation form of the Markov property itself has no
// finite-sample estimator here; what this module tests are its testable
// consequences (flow composition, Chapman-Kolmogorov, homogeneity).
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rplap/stepper.hpp"

namespace rplap {

// Bounded functional of the state, optionally Lipschitz in the discrete
// L^1 norm.
struct ObservableSpec {
  std::string label;
  double bound = 0.0;
  std::optional<double> lipschitz_const;
  std::function<double(const GridFunction&)> eval;
};

// Registry: "clipped_l1", "cyl_sin:<a>", "const:<c>".
ObservableSpec make_observable(const std::string& spec);

struct SemigroupEstimate {
  double value = 0.0;
  double std_error = 0.0;
  int n_samples = 0;
  double s = 0.0, t = 0.0;
  std::string x_label, phi_label;
  std::uint64_t master_seed = 0;
};

// Common simulation context for the estimators.
struct MarkovSetup {
  double dt = 0.0;
  NoiseField phi;
  PlapParams params;
  SolverOptions opts;
};

// max over the evaluation times of ||u(t)-v(t)||_1 - ||u0-v0||_1 under
// common noise; n_eval_times <= 0 means every step time.
double contraction_check(const GridFunction& u0, const GridFunction& v0,
                         const BrownianPath& path, const NoiseField& phi,
                         const PlapParams& params, const SolverOptions& opts,
                         int n_eval_times = 0);

// ||u(t,r,.) - u(t,s,u(s,r,.))||_1 with the shared absolute-indexed path.
double flow_check(const GridFunction& u_r, double r, double s, double t,
                  const BrownianPath& path, const NoiseField& phi,
                  const PlapParams& params, const SolverOptions& opts);

// MC estimate of E[phi_obs(u(t,s,x))] over independent noise paths.
SemigroupEstimate semigroup_estimate(const ObservableSpec& obs,
                                     const GridFunction& x, double s, double t,
                                     const MarkovSetup& setup, int n_samples,
                                     std::uint64_t master_seed,
                                     std::uint64_t stream_salt = 0);

struct GapEstimate {
  double gap = 0.0;
  double combined_se = 0.0;
};

// |direct - nested| estimate of the two-step composition, nested layer
// running n_outer paths then n_inner fresh paths per endpoint.
GapEstimate chapman_kolmogorov_check(const ObservableSpec& obs,
                                     const GridFunction& x, double r, double s,
                                     double t, const MarkovSetup& setup,
                                     int n_outer, int n_inner,
                                     std::uint64_t master_seed);

// |estimate over [s,t] - estimate over [0,t-s]|; requires a
// time-independent noise field.
GapEstimate homogeneity_check(const ObservableSpec& obs, const GridFunction& x,
                              double s, double t, const MarkovSetup& setup,
                              int n_samples, std::uint64_t master_seed);

// |P phi(x) - P phi(z)| - L * ||x - z||_1 under common-path coupling;
// requires obs.lipschitz_const.
double e_property_check(const ObservableSpec& obs, const GridFunction& x,
                        const GridFunction& z, double s, double t,
                        const MarkovSetup& setup, int n_samples,
                        std::uint64_t master_seed);

struct FellerPoint {
  double delta;
  double gap;  // |P phi(x + delta*w) - P phi(x)| under common paths
  double se;   // standard error of the per-path differences
};

// Coupled estimates along a shrinking perturbation x + delta_j * w.
std::vector<FellerPoint> feller_sequence(const ObservableSpec& obs,
                                         const GridFunction& x,
                                         const GridFunction& w,
                                         const std::vector<double>& deltas,
                                         double s, double t,
                                         const MarkovSetup& setup, int n_samples,
                                         std::uint64_t master_seed);

}  // namespace rplap
