#include "rplap/stepper.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace rplap {

namespace {

double objective(const GridFunction& v, const GridFunction& b, double dt,
                 const PlapParams& params) {
  const double vol = std::pow(v.mesh.h, v.mesh.dim);
  double quad = 0.0;
  for (int i = 0; i < v.size(); ++i) {
    const double d = v[i] - b[i];
    quad += d * d;
  }
  return 0.5 * vol * quad + dt * energy(v, params);
}

// Newton matrix I + dt * A_h'(v): Laplacian stencil with per-edge tangent
// weights.
Eigen::SparseMatrix<double> newton_matrix(const GridFunction& v, double dt,
                                          const PlapParams& params,
                                          const std::vector<GridEdge>& edges) {
  const int n = v.size();
  const double inv_h2 = 1.0 / (v.mesh.h * v.mesh.h);
  const EdgeField g = discrete_gradient(v);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(n) + 4 * edges.size());
  for (int i = 0; i < n; ++i) trips.emplace_back(i, i, 1.0);
  for (size_t e = 0; e < edges.size(); ++e) {
    const double w = dt * plap_weight_tangent(g.values[e], params) * inv_h2;
    const int a = edges[e].a, b = edges[e].b;
    if (a >= 0) trips.emplace_back(a, a, w);
    if (b >= 0) trips.emplace_back(b, b, w);
    if (a >= 0 && b >= 0) {
      trips.emplace_back(a, b, -w);
      trips.emplace_back(b, a, -w);
    }
  }
  Eigen::SparseMatrix<double> m(n, n);
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

}  // namespace

void SolverOptions::validate() const {
  if (!(newton_tol > 0.0))
    throw std::invalid_argument("SolverOptions: newton_tol must be > 0");
  if (max_newton_iters < 1)
    throw std::invalid_argument("SolverOptions: max_newton_iters must be >= 1");
}

GridFunction implicit_step(const GridFunction& u_prev, double dt,
                           const GridFunction& forcing, const PlapParams& params,
                           const SolverOptions& opts) {
  if (!(dt > 0.0)) throw std::invalid_argument("implicit_step: dt must be > 0");
  params.validate_for_solver();
  opts.validate();
  if (!all_finite(u_prev) || !all_finite(forcing))
    throw std::invalid_argument("implicit_step: non-finite input");

  const int n = u_prev.size();
  GridFunction b(u_prev.mesh);
  for (int i = 0; i < n; ++i) b[i] = u_prev[i] + forcing[i];

  const auto edges = make_edges(u_prev.mesh);

  auto residual = [&](const GridFunction& w, Eigen::VectorXd& r) {
    const GridFunction aw = apply_plap(w, params);
    double sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
      r[i] = w[i] + dt * aw[i] - b[i];
      sum_sq += r[i] * r[i];
    }
    return sum_sq;
  };

  GridFunction v = b;
  Eigen::VectorXd r(n), r_trial(n);
  double merit = residual(v, r);
  double last_residual = 0.0;
  for (int iter = 0; iter < opts.max_newton_iters; ++iter) {
    last_residual = r.cwiseAbs().maxCoeff();
    if (last_residual <= opts.newton_tol) return v;

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol;
    chol.compute(newton_matrix(v, dt, params, edges));
    if (chol.info() != Eigen::Success)
      throw std::runtime_error("implicit_step: Newton system factorization failed");
    const Eigen::VectorXd delta = chol.solve(-r);

    // Backtracking on the residual merit |r|^2 (the Newton direction is a
    // descent direction for it, the Jacobian being SPD), guarded by
    // non-increase of J up to rounding so the convex objective decreases
    // monotonically.
    const double j0 = objective(v, b, dt, params);
    const double j_guard = j0 + 1e-12 * (std::abs(j0) + 1.0);
    double alpha = 1.0;
    GridFunction trial(v.mesh);
    double trial_merit = merit;
    for (int ls = 0; ls < 60; ++ls) {
      for (int i = 0; i < n; ++i) trial[i] = v[i] + alpha * delta[i];
      trial_merit = residual(trial, r_trial);
      if (trial_merit <= (1.0 - 2e-4 * alpha) * merit &&
          objective(trial, b, dt, params) <= j_guard)
        break;
      alpha *= 0.5;
    }
    v = trial;
    r.swap(r_trial);
    merit = trial_merit;
  }
  throw NonConvergenceError(last_residual);
}

int grid_index(double t, double r, double dt) {
  const double x = (t - r) / dt;
  const double rounded = std::round(x);
  if (std::abs(x - rounded) > 1e-9 * std::max(1.0, std::abs(x)))
    throw OffGridError(t);
  return static_cast<int>(rounded);
}

const GridFunction& Trajectory::state_at(double t) const {
  return states[static_cast<size_t>(step_index_of(t))];
}

double Trajectory::increment(int i) const {
  const int abs_step = grid_index(start_time, 0.0, dt) + i;
  return path.increments[static_cast<size_t>(abs_step)];
}

int Trajectory::step_index_of(double t) const {
  const int idx = grid_index(t, start_time, dt);
  if (idx < 0 || idx > n_steps()) throw OffGridError(t);
  return idx;
}

Trajectory solve_path(const GridFunction& u_r, double r, double t,
                      const BrownianPath& path, const NoiseField& phi,
                      const PlapParams& params, const SolverOptions& opts) {
  if (t < r) throw std::invalid_argument("solve_path: t must be >= r");
  const double dt = path.dt;
  const int first = grid_index(r, 0.0, dt);
  const int last = grid_index(t, 0.0, dt);
  if (last > path.n_steps())
    throw std::invalid_argument("solve_path: path does not cover [r, t]");

  Trajectory traj;
  traj.mesh = u_r.mesh;
  traj.start_time = r;
  traj.dt = dt;
  traj.params = params;
  traj.opts = opts;
  traj.path = path;
  traj.phi = phi;
  traj.states.reserve(static_cast<size_t>(last - first) + 1);
  traj.states.push_back(u_r);

  GridFunction u = u_r;
  for (int nstep = first; nstep < last; ++nstep) {
    const double t_n = nstep * dt;
    const GridFunction f =
        ito_forcing(phi, t_n, path.increments[static_cast<size_t>(nstep)], u.mesh);
    try {
      u = implicit_step(u, dt, f, params, opts);
    } catch (const NonConvergenceError& err) {
      throw NonConvergenceError(err.residual, nstep);
    }
    traj.states.push_back(u);
  }
  return traj;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& csv_path,
                          const std::string& meta_path) {
  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot open " + csv_path);
  csv << "step,time,node_index,value\n";
  char buf[64];
  for (int s = 0; s < static_cast<int>(traj.states.size()); ++s) {
    for (int i = 0; i < traj.states[static_cast<size_t>(s)].size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", traj.time(s));
      csv << s << ',' << buf << ',' << i << ',';
      std::snprintf(buf, sizeof(buf), "%.17g",
                    traj.states[static_cast<size_t>(s)][i]);
      csv << buf << '\n';
    }
  }
  std::ofstream meta(meta_path);
  if (!meta) throw std::runtime_error("cannot open " + meta_path);
  meta << "seed = " << traj.path.seed << '\n';
  std::snprintf(buf, sizeof(buf), "%.17g", traj.params.p);
  meta << "p = " << buf << '\n';
  std::snprintf(buf, sizeof(buf), "%.17g", traj.params.eps);
  meta << "eps = " << buf << '\n';
  std::snprintf(buf, sizeof(buf), "%.17g", traj.dt);
  meta << "dt = " << buf << '\n';
  std::snprintf(buf, sizeof(buf), "%.17g", traj.mesh.h);
  meta << "h = " << buf << '\n';
  meta << "phi = " << traj.phi.label << '\n';
}

}  // namespace rplap
