// Implicit Euler-Maruyama stepping: each step solves the strictly convex
// minimization J(v) = 0.5*||v - (u_prev + forcing)||^2_{l2,h} + dt*E(v),
// i.e. v + dt*A_h(v) = u_prev + forcing, by damped Newton.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "rplap/grid.hpp"
#include "rplap/noise.hpp"
#include "rplap/plap.hpp"

namespace rplap {

struct SolverOptions {
  double newton_tol = 1e-10;  // residual sup-norm threshold
  int max_newton_iters = 200;

  void validate() const;
};

struct NonConvergenceError : std::runtime_error {
  NonConvergenceError(double residual_, int step_index_ = -1)
      : std::runtime_error("implicit step did not converge (residual " +
                           std::to_string(residual_) + ", step " +
                           std::to_string(step_index_) + ")"),
        residual(residual_),
        step_index(step_index_) {}
  double residual;
  int step_index;  // -1 when outside a path solve
};

struct OffGridError : std::runtime_error {
  explicit OffGridError(double t)
      : std::runtime_error("time " + std::to_string(t) + " is not on the step grid") {}
};

// Unique solution of v + dt*A_h(v) = u_prev + forcing with residual
// sup-norm <= opts.newton_tol. Line search guarantees monotone decrease
// of J. Requires eps > 0 when p < 2.
GridFunction implicit_step(const GridFunction& u_prev, double dt,
                           const GridFunction& forcing, const PlapParams& params,
                           const SolverOptions& opts);

// States of one sample path, with noise increments indexed by the absolute
// step number so restarted solves reuse the same realization.
struct Trajectory {
  Mesh mesh;
  double start_time = 0.0;
  double dt = 0.0;
  PlapParams params;
  SolverOptions opts;
  BrownianPath path;  // absolute indexing from time 0
  NoiseField phi;
  std::vector<GridFunction> states;

  int n_steps() const { return static_cast<int>(states.size()) - 1; }
  double time(int i) const { return start_time + i * dt; }
  const GridFunction& initial() const { return states.front(); }
  const GridFunction& final() const { return states.back(); }
  // noise increment consumed by local step i (absolute indexing)
  double increment(int i) const;
  // state at a grid time; throws OffGridError between grid points
  const GridFunction& state_at(double t) const;
  int step_index_of(double t) const;
};

// Integrates from u_r at time r to time t; r and t must sit on the
// absolute step grid covered by `path`. r == t yields the single-state
// trajectory.
Trajectory solve_path(const GridFunction& u_r, double r, double t,
                      const BrownianPath& path, const NoiseField& phi,
                      const PlapParams& params, const SolverOptions& opts);

// CSV with columns step,time,node_index,value plus a key=value sidecar
// (seed, p, eps, dt, h, phi name).
void write_trajectory_csv(const Trajectory& traj, const std::string& csv_path,
                          const std::string& meta_path);

// Index of t on the grid {r + n*dt}; throws OffGridError if t is not a
// grid point (relative tolerance 1e-9).
int grid_index(double t, double r, double dt);

}  // namespace rplap
