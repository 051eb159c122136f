#include "rplap/markov.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "rplap/parallel.hpp"

namespace rplap {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_and_se(const std::vector<double>& xs) {
  MeanSe out;
  const auto n = static_cast<double>(xs.size());
  for (double x : xs) out.mean += x;
  out.mean /= n;
  if (xs.size() > 1) {
    double var = 0.0;
    for (double x : xs) var += (x - out.mean) * (x - out.mean);
    out.se = std::sqrt(var / (n - 1.0)) / std::sqrt(n);
  }
  return out;
}

int window_steps(double s, double t, double dt) {
  const int i0 = grid_index(s, 0.0, dt);
  const int i1 = grid_index(t, 0.0, dt);
  if (i1 < i0) throw std::invalid_argument("window: t must be >= s");
  return i1;
}

}  // namespace

ObservableSpec make_observable(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ':')) parts.push_back(tok);
  if (parts.empty()) throw std::invalid_argument("make_observable: empty spec");
  auto num = [&](size_t i) {
    if (i >= parts.size())
      throw std::invalid_argument("make_observable: missing parameter in '" + spec + "'");
    return std::stod(parts[i]);
  };
  if (parts[0] == "clipped_l1")
    return {spec, 1.0, 1.0, [](const GridFunction& w) {
              return std::min(norm_lq(w, 1.0), 1.0);
            }};
  if (parts[0] == "cyl_sin") {
    const double a = num(1);
    return {spec, 1.0, std::abs(a),
            [a](const GridFunction& w) {
              double acc = 0.0;
              for (int i = 0; i < w.size(); ++i) {
                const auto c = w.mesh.node_coord(i);
                const double profile =
                    std::sin(kPi * c[0]) *
                    (w.mesh.dim == 2 ? std::sin(kPi * c[1]) : 1.0);
                acc += w[i] * profile;
              }
              return std::tanh(a * acc * std::pow(w.mesh.h, w.mesh.dim));
            }};
  }
  if (parts[0] == "const") {
    const double c = num(1);
    return {spec, std::abs(c), 0.0,
            [c](const GridFunction&) { return c; }};
  }
  throw std::invalid_argument("make_observable: unknown observable '" + spec + "'");
}

double contraction_check(const GridFunction& u0, const GridFunction& v0,
                         const BrownianPath& path, const NoiseField& phi,
                         const PlapParams& params, const SolverOptions& opts,
                         int n_eval_times) {
  if (!(u0.mesh == v0.mesh))
    throw std::invalid_argument("contraction_check: meshes differ");
  const double t_end = path.n_steps() * path.dt;
  const Trajectory u = solve_path(u0, 0.0, t_end, path, phi, params, opts);
  const Trajectory v = solve_path(v0, 0.0, t_end, path, phi, params, opts);
  GridFunction diff(u0.mesh);
  for (int i = 0; i < u0.size(); ++i) diff[i] = u0[i] - v0[i];
  const double base = norm_lq(diff, 1.0);

  const int n = u.n_steps();
  if (n == 0) return 0.0;
  const int m = n_eval_times <= 0 ? n : std::min(n_eval_times, n);
  double worst = -std::numeric_limits<double>::infinity();
  for (int j = 1; j <= m; ++j) {
    const int idx = n_eval_times <= 0 ? j : (j * n) / m;
    const GridFunction& us = u.states[static_cast<size_t>(idx)];
    const GridFunction& vs = v.states[static_cast<size_t>(idx)];
    for (int i = 0; i < us.size(); ++i) diff[i] = us[i] - vs[i];
    worst = std::max(worst, norm_lq(diff, 1.0) - base);
  }
  return worst;
}

double flow_check(const GridFunction& u_r, double r, double s, double t,
                  const BrownianPath& path, const NoiseField& phi,
                  const PlapParams& params, const SolverOptions& opts) {
  if (!(r <= s && s <= t)) throw std::invalid_argument("flow_check: need r <= s <= t");
  const Trajectory direct = solve_path(u_r, r, t, path, phi, params, opts);
  const Trajectory leg1 = solve_path(u_r, r, s, path, phi, params, opts);
  const Trajectory leg2 = solve_path(leg1.final(), s, t, path, phi, params, opts);
  GridFunction diff(u_r.mesh);
  for (int i = 0; i < diff.size(); ++i)
    diff[i] = direct.final()[i] - leg2.final()[i];
  return norm_lq(diff, 1.0);
}

SemigroupEstimate semigroup_estimate(const ObservableSpec& obs,
                                     const GridFunction& x, double s, double t,
                                     const MarkovSetup& setup, int n_samples,
                                     std::uint64_t master_seed,
                                     std::uint64_t stream_salt) {
  if (n_samples < 2)
    throw std::invalid_argument("semigroup_estimate: n_samples must be >= 2");
  const int last = window_steps(s, t, setup.dt);
  const std::uint64_t stream =
      static_cast<std::uint64_t>(grid_index(s, 0.0, setup.dt)) ^ stream_salt;
  std::vector<double> values(static_cast<size_t>(n_samples));
  parallel_for(n_samples, [&](int k) {
    const BrownianPath path = sample_brownian(
        derive_seed(master_seed, stream, static_cast<std::uint64_t>(k)), last,
        setup.dt);
    const Trajectory traj =
        solve_path(x, s, t, path, setup.phi, setup.params, setup.opts);
    values[static_cast<size_t>(k)] = obs.eval(traj.final());
  });
  const MeanSe ms = mean_and_se(values);
  return {ms.mean, ms.se, n_samples, s, t, "", setup.phi.label, master_seed};
}

GapEstimate chapman_kolmogorov_check(const ObservableSpec& obs,
                                     const GridFunction& x, double r, double s,
                                     double t, const MarkovSetup& setup,
                                     int n_outer, int n_inner,
                                     std::uint64_t master_seed) {
  if (!(r <= s && s <= t))
    throw std::invalid_argument("chapman_kolmogorov_check: need r <= s <= t");
  if (n_outer < 2 || n_inner < 2)
    throw std::invalid_argument("chapman_kolmogorov_check: need n_outer, n_inner >= 2");

  // direct estimate of the full window on its own substream
  const SemigroupEstimate direct =
      semigroup_estimate(obs, x, r, t, setup, n_outer * n_inner, master_seed,
                         0xD1ULL);

  // nested: outer paths to s, then per endpoint a fresh inner estimate
  const int s_steps = window_steps(r, s, setup.dt);
  std::vector<double> inner_means(static_cast<size_t>(n_outer));
  parallel_for(n_outer, [&](int j) {
    const BrownianPath outer_path = sample_brownian(
        derive_seed(master_seed, 0xA1ULL, static_cast<std::uint64_t>(j)), s_steps,
        setup.dt);
    const Trajectory outer =
        solve_path(x, r, s, outer_path, setup.phi, setup.params, setup.opts);
    const SemigroupEstimate inner = semigroup_estimate(
        obs, outer.final(), s, t, setup, n_inner, master_seed,
        0xB100ULL + static_cast<std::uint64_t>(j));
    inner_means[static_cast<size_t>(j)] = inner.value;
  });
  const MeanSe nested = mean_and_se(inner_means);

  GapEstimate out;
  out.gap = std::abs(direct.value - nested.mean);
  out.combined_se = std::sqrt(direct.std_error * direct.std_error +
                              nested.se * nested.se);
  return out;
}

GapEstimate homogeneity_check(const ObservableSpec& obs, const GridFunction& x,
                              double s, double t, const MarkovSetup& setup,
                              int n_samples, std::uint64_t master_seed) {
  if (!setup.phi.time_independent)
    throw std::invalid_argument(
        "homogeneity_check: requires a time-independent noise field");
  const SemigroupEstimate shifted =
      semigroup_estimate(obs, x, s, t, setup, n_samples, master_seed);
  const SemigroupEstimate based =
      semigroup_estimate(obs, x, 0.0, t - s, setup, n_samples, master_seed);
  GapEstimate out;
  out.gap = std::abs(shifted.value - based.value);
  out.combined_se = std::sqrt(shifted.std_error * shifted.std_error +
                              based.std_error * based.std_error);
  return out;
}

double e_property_check(const ObservableSpec& obs, const GridFunction& x,
                        const GridFunction& z, double s, double t,
                        const MarkovSetup& setup, int n_samples,
                        std::uint64_t master_seed) {
  if (!obs.lipschitz_const)
    throw std::invalid_argument("e_property_check: observable has no Lipschitz constant");
  if (n_samples < 2)
    throw std::invalid_argument("e_property_check: n_samples must be >= 2");
  const int last = window_steps(s, t, setup.dt);
  const std::uint64_t stream = static_cast<std::uint64_t>(grid_index(s, 0.0, setup.dt));
  std::vector<double> vals_x(static_cast<size_t>(n_samples));
  std::vector<double> vals_z(static_cast<size_t>(n_samples));
  parallel_for(n_samples, [&](int k) {
    // common-path coupling: one realization drives both initial data
    const BrownianPath path = sample_brownian(
        derive_seed(master_seed, stream, static_cast<std::uint64_t>(k)), last,
        setup.dt);
    vals_x[static_cast<size_t>(k)] = obs.eval(
        solve_path(x, s, t, path, setup.phi, setup.params, setup.opts).final());
    vals_z[static_cast<size_t>(k)] = obs.eval(
        solve_path(z, s, t, path, setup.phi, setup.params, setup.opts).final());
  });
  double sum_x = 0.0, sum_z = 0.0;
  for (int k = 0; k < n_samples; ++k) {
    sum_x += vals_x[static_cast<size_t>(k)];
    sum_z += vals_z[static_cast<size_t>(k)];
  }
  GridFunction diff(x.mesh);
  for (int i = 0; i < x.size(); ++i) diff[i] = x[i] - z[i];
  const double n = static_cast<double>(n_samples);
  return std::abs(sum_x / n - sum_z / n) - *obs.lipschitz_const * norm_lq(diff, 1.0);
}

std::vector<FellerPoint> feller_sequence(const ObservableSpec& obs,
                                         const GridFunction& x,
                                         const GridFunction& w,
                                         const std::vector<double>& deltas,
                                         double s, double t,
                                         const MarkovSetup& setup, int n_samples,
                                         std::uint64_t master_seed) {
  if (n_samples < 2)
    throw std::invalid_argument("feller_sequence: n_samples must be >= 2");
  const int last = window_steps(s, t, setup.dt);
  const std::uint64_t stream = static_cast<std::uint64_t>(grid_index(s, 0.0, setup.dt));
  std::vector<std::vector<double>> diffs(deltas.size(),
                                         std::vector<double>(n_samples));
  parallel_for(n_samples, [&](int k) {
    const BrownianPath path = sample_brownian(
        derive_seed(master_seed, stream, static_cast<std::uint64_t>(k)), last,
        setup.dt);
    const double base = obs.eval(
        solve_path(x, s, t, path, setup.phi, setup.params, setup.opts).final());
    GridFunction xj(x.mesh);
    for (size_t j = 0; j < deltas.size(); ++j) {
      for (int i = 0; i < x.size(); ++i) xj[i] = x[i] + deltas[j] * w[i];
      const double shifted = obs.eval(
          solve_path(xj, s, t, path, setup.phi, setup.params, setup.opts).final());
      diffs[j][static_cast<size_t>(k)] = shifted - base;
    }
  });
  std::vector<FellerPoint> points;
  for (size_t j = 0; j < deltas.size(); ++j) {
    const MeanSe ms = mean_and_se(diffs[j]);
    points.push_back({deltas[j], std::abs(ms.mean), ms.se});
  }
  return points;
}

}  // namespace rplap
