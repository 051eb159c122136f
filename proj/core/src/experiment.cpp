#include "rplap/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include "rplap/markov.hpp"
#include "rplap/noise.hpp"
#include "rplap/parallel.hpp"
#include "rplap/regularizer.hpp"
#include "rplap/stepper.hpp"
#include "rplap/verifier.hpp"

namespace fs = std::filesystem;

namespace rplap {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  const auto slash = v.find('/');
  try {
    if (slash != std::string::npos) {
      size_t pa = 0, pb = 0;
      const std::string num = trim(v.substr(0, slash)), den = trim(v.substr(slash + 1));
      const double a = std::stod(num, &pa), b = std::stod(den, &pb);
      if (pa != num.size() || pb != den.size() || b == 0.0) throw std::invalid_argument(v);
      return a / b;
    }
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': bad number '" + v + "'");
  }
}

int parse_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const int x = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': bad integer '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const std::uint64_t x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': bad unsigned '" + v + "'");
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, sep)) out.push_back(trim(tok));
  return out;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig config;
  std::map<std::string, bool> seen;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line without '=': '" + stripped + "'");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line with empty key");
    if (seen[key]) throw ConfigError("duplicate config key '" + key + "'");
    seen[key] = true;

    if (key == "command") config.command = value;
    else if (key == "dim") config.dim = parse_int(key, value);
    else if (key == "n") config.n = parse_int(key, value);
    else if (key == "T") config.T = parse_double(key, value);
    else if (key == "dt") config.dt = parse_double(key, value);
    else if (key == "r") config.r = parse_double(key, value);
    else if (key == "p") config.p = parse_double(key, value);
    else if (key == "eps") config.eps = parse_double(key, value);
    else if (key == "newton_tol") config.newton_tol = parse_double(key, value);
    else if (key == "max_newton_iters") config.max_newton_iters = parse_int(key, value);
    else if (key == "phi") config.phi = value;
    else if (key == "seed") config.seed = parse_u64(key, value);
    else if (key == "u0") config.u0 = value;
    else if (key == "v0") config.v0 = value;
    else if (key == "s_family") config.s_family = value;
    else if (key == "psi") config.psi = value;
    else if (key == "h_family") config.h_family = value;
    else if (key == "z_family") config.z_family = value;
    else if (key == "observable") config.observable = value;
    else if (key == "input") config.input = value;
    else if (key == "check") config.check = value;
    else if (key == "ensemble") config.ensemble = parse_int(key, value);
    else if (key == "n_outer") config.n_outer = parse_int(key, value);
    else if (key == "n_inner") config.n_inner = parse_int(key, value);
    else if (key == "n_samples") config.n_samples = parse_int(key, value);
    else if (key == "n_eval_times") config.n_eval_times = parse_int(key, value);
    else if (key == "reps") config.reps = parse_int(key, value);
    else if (key == "k") config.k = parse_double(key, value);
    else if (key == "s") config.s = parse_double(key, value);
    else if (key == "t") config.t = parse_double(key, value);
    else if (key == "t_eval") config.t_eval = parse_double(key, value);
    else if (key == "out") config.out = value;
    else if (key == "ks") {
      config.ks.clear();
      for (const auto& item : split(value, ','))
        config.ks.push_back(parse_double(key, item));
    } else if (key == "levels") {
      config.levels.clear();
      for (const auto& item : split(value, ','))
        config.levels.push_back(parse_int(key, item));
    } else if (key == "ladder") {
      config.ladder.clear();
      for (const auto& item : split(value, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos)
          throw ConfigError("config key 'ladder': entry '" + item + "' is not n:dt");
        config.ladder.emplace_back(parse_int(key, trim(item.substr(0, colon))),
                                   parse_double(key, trim(item.substr(colon + 1))));
      }
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  if (config.command.empty()) throw ConfigError("missing config key 'command'");
  return config;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

namespace {

std::vector<std::string> echo_keys(const std::string& command) {
  if (command == "simulate")
    return {"command", "dim",       "n",   "T",    "dt",  "r",
            "p",       "eps",       "phi", "seed", "u0",  "newton_tol",
            "max_newton_iters", "out"};
  if (command == "verify-renorm")
    return {"command", "dim",      "T",        "p",      "eps",  "phi",
            "seed",    "u0",       "s_family", "psi",    "ladder", "t_eval",
            "newton_tol", "max_newton_iters", "out"};
  if (command == "verify-product")
    return {"command", "dim",      "T",        "p",        "eps",    "phi",
            "seed",    "u0",       "v0",       "h_family", "z_family", "ladder",
            "t_eval",  "newton_tol", "max_newton_iters", "out"};
  if (command == "verify-energy")
    return {"command", "dim", "n",  "T",  "dt",       "p",   "eps", "phi", "seed",
            "u0",      "ensemble", "k", "ks", "newton_tol", "max_newton_iters", "out"};
  if (command == "markov")
    return {"command",   "dim",     "n",        "T",          "dt",      "p",
            "eps",       "phi",     "seed",     "u0",         "v0",      "observable",
            "check",     "r",       "s",        "t",          "n_outer", "n_inner",
            "n_samples", "n_eval_times", "reps", "newton_tol", "max_newton_iters", "out"};
  if (command == "regularizer")
    return {"command", "dim", "n", "input", "levels", "p", "out"};
  throw ConfigError("unknown command '" + command + "'");
}

std::string value_of(const ExperimentConfig& c, const std::string& key) {
  if (key == "command") return c.command;
  if (key == "dim") return std::to_string(c.dim);
  if (key == "n") return std::to_string(c.n);
  if (key == "T") return fmt(c.T);
  if (key == "dt") return fmt(c.dt);
  if (key == "r") return fmt(c.r);
  if (key == "p") return fmt(c.p);
  if (key == "eps") return fmt(c.eps);
  if (key == "newton_tol") return fmt(c.newton_tol);
  if (key == "max_newton_iters") return std::to_string(c.max_newton_iters);
  if (key == "phi") return c.phi;
  if (key == "seed") return std::to_string(c.seed);
  if (key == "u0") return c.u0;
  if (key == "v0") return c.v0;
  if (key == "s_family") return c.s_family;
  if (key == "psi") return c.psi;
  if (key == "h_family") return c.h_family;
  if (key == "z_family") return c.z_family;
  if (key == "observable") return c.observable;
  if (key == "input") return c.input;
  if (key == "check") return c.check;
  if (key == "ensemble") return std::to_string(c.ensemble);
  if (key == "n_outer") return std::to_string(c.n_outer);
  if (key == "n_inner") return std::to_string(c.n_inner);
  if (key == "n_samples") return std::to_string(c.n_samples);
  if (key == "n_eval_times") return std::to_string(c.n_eval_times);
  if (key == "reps") return std::to_string(c.reps);
  if (key == "k") return fmt(c.k);
  if (key == "s") return fmt(c.s);
  if (key == "t") return fmt(c.t);
  if (key == "t_eval") return fmt(c.t_eval);
  if (key == "out") return c.out;
  if (key == "ks") {
    std::string joined;
    for (size_t i = 0; i < c.ks.size(); ++i)
      joined += (i ? "," : "") + fmt(c.ks[i]);
    return joined;
  }
  if (key == "levels") {
    std::string joined;
    for (size_t i = 0; i < c.levels.size(); ++i)
      joined += (i ? "," : "") + std::to_string(c.levels[i]);
    return joined;
  }
  if (key == "ladder") {
    std::string joined;
    for (size_t i = 0; i < c.ladder.size(); ++i)
      joined += (i ? "," : "") + std::to_string(c.ladder[i].first) + ":" +
                fmt(c.ladder[i].second);
    return joined;
  }
  throw ConfigError("unknown echo key '" + key + "'");
}

}  // namespace

std::string canonical_config(const ExperimentConfig& config) {
  std::string text;
  for (const auto& key : echo_keys(config.command)) {
    const std::string v = value_of(config, key);
    if (v.empty()) continue;
    text += key + " = " + v + "\n";
  }
  return text;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::uint64_t hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return fnv1a64(ss.str());
}

GridFunction make_initial_datum(const std::string& spec, const Mesh& mesh,
                                std::uint64_t seed) {
  const auto parts = split(spec, ':');
  if (parts.empty()) throw ConfigError("empty initial datum spec");
  auto num = [&](size_t i) {
    if (i >= parts.size())
      throw ConfigError("initial datum '" + spec + "': missing parameter");
    return parse_double("u0", parts[i]);
  };
  GridFunction u(mesh);
  if (parts[0] == "zero") return u;
  if (parts[0] == "eigenmode") {
    const double amp = num(1);
    const double mode = parts.size() > 2 ? num(2) : 1.0;
    for (int i = 0; i < u.size(); ++i) {
      const auto c = mesh.node_coord(i);
      u[i] = amp * std::sin(mode * kPi * c[0]) *
             (mesh.dim == 2 ? std::sin(mode * kPi * c[1]) : 1.0);
    }
    return u;
  }
  if (parts[0] == "spike") {
    const double mass = num(1);
    const int node = static_cast<int>(derive_seed(seed, 0x5BULL, 0) %
                                      static_cast<std::uint64_t>(mesh.n_nodes()));
    u[node] = mass / std::pow(mesh.h, mesh.dim);
    return u;
  }
  if (parts[0] == "step") {
    const double amp = num(1);
    for (int i = 0; i < u.size(); ++i)
      u[i] = mesh.node_coord(i)[0] < 0.5 ? amp : 0.0;
    return u;
  }
  if (parts[0] == "random") {
    const double amp = num(1);
    std::mt19937_64 rng(derive_seed(seed, 0x7AULL, 0));
    for (int i = 0; i < u.size(); ++i) u[i] = amp * (2.0 * uniform01(rng) - 1.0);
    return u;
  }
  throw ConfigError("unknown initial datum '" + spec + "'");
}

namespace {

struct CampaignContext {
  const ExperimentConfig& config;
  std::vector<std::string> artifacts;  // relative file names, hash order
  std::vector<std::string> failures;

  std::string path_of(const std::string& name) const {
    return (fs::path(config.out) / name).string();
  }
  void note(const std::string& name) { artifacts.push_back(name); }
  void fail(const std::string& what) { failures.push_back(what); }
};

void write_manifest(CampaignContext& ctx) {
  const std::string path = ctx.path_of("manifest.txt");
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "'");
  out << canonical_config(ctx.config);
  std::uint64_t campaign = 0xCBF29CE484222325ULL;
  char buf[32];
  for (const auto& name : ctx.artifacts) {
    const std::uint64_t h = hash_file(ctx.path_of(name));
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    out << "# content-hash " << name << " " << buf << "\n";
    campaign ^= h;
    campaign *= 0x100000001B3ULL;
  }
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(campaign));
  out << "# campaign-hash " << buf << "\n";
}

SolverOptions options_of(const ExperimentConfig& c) {
  SolverOptions opts;
  opts.newton_tol = c.newton_tol;
  opts.max_newton_iters = c.max_newton_iters;
  return opts;
}

void run_simulate(CampaignContext& ctx) {
  const auto& c = ctx.config;
  const Mesh mesh(c.dim, c.n);
  const PlapParams params{c.p, c.eps};
  const NoiseField field = make_noise_field(c.phi);
  const GridFunction init = make_initial_datum(c.u0, mesh, c.seed);
  const int last = grid_index(c.T, 0.0, c.dt);
  const BrownianPath path = sample_brownian(c.seed, last, c.dt);
  const Trajectory traj =
      solve_path(init, c.r, c.T, path, field, params, options_of(c));
  write_trajectory_csv(traj, ctx.path_of("trajectory.csv"),
                       ctx.path_of("trajectory.meta"));
  ctx.note("trajectory.csv");
  ctx.note("trajectory.meta");
}

// Shared ladder walk: the Brownian path is drawn once at the finest step
// and aggregated upward, so every level sees the same realization.
std::vector<BrownianPath> ladder_paths(const ExperimentConfig& c) {
  if (c.ladder.empty()) throw ConfigError("command requires a 'ladder'");
  double dt_min = c.ladder.front().second;
  for (const auto& [n, dt] : c.ladder) dt_min = std::min(dt_min, dt);
  const int fine_steps = grid_index(c.T, 0.0, dt_min);
  const BrownianPath fine = sample_brownian(c.seed, fine_steps, dt_min);
  std::vector<BrownianPath> paths;
  for (const auto& [n, dt] : c.ladder) {
    const double ratio = dt / dt_min;
    const int factor = static_cast<int>(std::round(ratio));
    if (std::abs(ratio - factor) > 1e-9)
      throw ConfigError("ladder dt values must be integer multiples of the finest");
    paths.push_back(coarsen(fine, factor));
  }
  return paths;
}

void check_monotone_residuals(CampaignContext& ctx,
                              const std::vector<ResidualReport>& reports) {
  for (size_t i = 1; i < reports.size(); ++i) {
    if (!(reports[i].residual < reports[i - 1].residual))
      ctx.fail("residual not decreasing between ladder levels " +
               std::to_string(i - 1) + " and " + std::to_string(i) + " (" +
               fmt(reports[i - 1].residual) + " -> " + fmt(reports[i].residual) +
               ")");
  }
}

void run_verify_renorm(CampaignContext& ctx) {
  const auto& c = ctx.config;
  if (c.s_family.empty() || c.psi.empty())
    throw ConfigError("verify-renorm requires 's_family' and 'psi'");
  const ScalarFamily family = make_family(c.s_family);
  const TestFunctionSpec psi = make_test_function(c.psi);
  const NoiseField field = make_noise_field(c.phi);
  const PlapParams params{c.p, c.eps};
  const auto paths = ladder_paths(c);
  const double t_eval = c.t_eval < 0.0 ? c.T : c.t_eval;
  std::vector<ResidualReport> reports;
  for (size_t lvl = 0; lvl < paths.size(); ++lvl) {
    const Mesh mesh(c.dim, c.ladder[lvl].first);
    const GridFunction init = make_initial_datum(c.u0, mesh, c.seed);
    const Trajectory traj =
        solve_path(init, 0.0, c.T, paths[lvl], field, params, options_of(c));
    reports.push_back(renorm_residual(traj, family, psi, t_eval));
  }
  write_residual_csv(reports, ctx.path_of("residuals.csv"));
  ctx.note("residuals.csv");
  check_monotone_residuals(ctx, reports);
}

void run_verify_product(CampaignContext& ctx) {
  const auto& c = ctx.config;
  if (c.v0.empty() || c.h_family.empty() || c.z_family.empty())
    throw ConfigError("verify-product requires 'v0', 'h_family' and 'z_family'");
  const ScalarFamily h_fam = make_family(c.h_family);
  const ScalarFamily z_fam = make_family(c.z_family);
  const NoiseField field = make_noise_field(c.phi);
  const PlapParams params{c.p, c.eps};
  const auto paths = ladder_paths(c);
  const double t_eval = c.t_eval < 0.0 ? c.T : c.t_eval;
  std::vector<ResidualReport> reports;
  for (size_t lvl = 0; lvl < paths.size(); ++lvl) {
    const Mesh mesh(c.dim, c.ladder[lvl].first);
    const GridFunction u_init = make_initial_datum(c.u0, mesh, c.seed);
    const GridFunction v_init = make_initial_datum(c.v0, mesh, c.seed);
    const Trajectory u_traj =
        solve_path(u_init, 0.0, c.T, paths[lvl], field, params, options_of(c));
    const Trajectory v_traj =
        solve_path(v_init, 0.0, c.T, paths[lvl], field, params, options_of(c));
    reports.push_back(ito_product_residual(u_traj, v_traj, h_fam, z_fam, t_eval));
  }
  write_residual_csv(reports, ctx.path_of("residuals.csv"));
  ctx.note("residuals.csv");
  check_monotone_residuals(ctx, reports);
}

std::vector<Trajectory> build_ensemble(const ExperimentConfig& c) {
  const Mesh mesh(c.dim, c.n);
  const PlapParams params{c.p, c.eps};
  const NoiseField field = make_noise_field(c.phi);
  const GridFunction init = make_initial_datum(c.u0, mesh, c.seed);
  const SolverOptions opts = options_of(c);
  const int last = grid_index(c.T, 0.0, c.dt);
  std::vector<Trajectory> trajs(static_cast<size_t>(c.ensemble));
  parallel_for(c.ensemble, [&](int i) {
    const BrownianPath path = sample_brownian(
        derive_seed(c.seed, 0xE5ULL, static_cast<std::uint64_t>(i)), last, c.dt);
    trajs[static_cast<size_t>(i)] =
        solve_path(init, 0.0, c.T, path, field, params, opts);
  });
  return trajs;
}

void run_verify_energy(CampaignContext& ctx) {
  const auto& c = ctx.config;
  if (c.ensemble < 1) throw ConfigError("verify-energy requires 'ensemble' >= 1");
  if (c.ks.empty()) throw ConfigError("verify-energy requires 'ks'");
  const auto trajs = build_ensemble(c);
  const TruncationEnergy te = truncation_energy(trajs, c.k);
  {
    const std::string path = ctx.path_of("energy.csv");
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "'");
    out << "k,energy,bound_surrogate,std_error\n";
    out << fmt(c.k) << ',' << fmt(te.energy) << ',' << fmt(te.bound_surrogate)
        << ',' << fmt(te.std_error) << '\n';
  }
  ctx.note("energy.csv");
  const auto profile = dissipation_profile(trajs, c.ks);
  {
    const std::string path = ctx.path_of("dissipation.csv");
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "'");
    out << "k,value\n";
    for (const auto& [k, value] : profile)
      out << fmt(k) << ',' << fmt(value) << '\n';
  }
  ctx.note("dissipation.csv");
  for (const auto& [k, value] : profile)
    if (value < 0.0) ctx.fail("dissipation band at k=" + fmt(k) + " is negative");
}

struct MarkovRow {
  std::string check;
  std::string params;
  double value;
  double threshold;
  bool passed;
};

void run_markov(CampaignContext& ctx) {
  const auto& c = ctx.config;
  const Mesh mesh(c.dim, c.n);
  const PlapParams params{c.p, c.eps};
  const NoiseField field = make_noise_field(c.phi);
  const MarkovSetup setup{c.dt, field, params, options_of(c)};
  const double slack = 10.0 * mesh.n_nodes() * c.newton_tol;
  const double t_end = c.t <= 0.0 ? c.T : c.t;
  std::vector<MarkovRow> rows;

  auto wants = [&](const std::string& name) {
    return c.check == "all" || c.check == name;
  };

  if (wants("contraction")) {
    const int steps = grid_index(t_end, 0.0, c.dt);
    for (int rep = 0; rep < c.reps; ++rep) {
      const auto idx = static_cast<std::uint64_t>(rep);
      const GridFunction a =
          make_initial_datum(c.u0, mesh, derive_seed(c.seed, 0xC0ULL, idx));
      const GridFunction b = make_initial_datum(
          c.v0.empty() ? c.u0 : c.v0, mesh, derive_seed(c.seed, 0xC1ULL, idx));
      const BrownianPath path =
          sample_brownian(derive_seed(c.seed, 0xC2ULL, idx), steps, c.dt);
      const double excess = contraction_check(a, b, path, field, params,
                                              options_of(c), c.n_eval_times);
      rows.push_back({"contraction", "rep=" + std::to_string(rep), excess, slack,
                      excess <= slack});
    }
  }

  if (wants("flow")) {
    const int steps = grid_index(t_end, 0.0, c.dt);
    for (int rep = 0; rep < c.reps; ++rep) {
      const auto idx = static_cast<std::uint64_t>(rep);
      std::mt19937_64 rng(derive_seed(c.seed, 0xF0ULL, idx));
      int a = static_cast<int>(rng() % static_cast<std::uint64_t>(steps + 1));
      int b = static_cast<int>(rng() % static_cast<std::uint64_t>(steps + 1));
      int d = static_cast<int>(rng() % static_cast<std::uint64_t>(steps + 1));
      int lo = std::min({a, b, d}), hi = std::max({a, b, d});
      int mid = a + b + d - lo - hi;
      const GridFunction u_r =
          make_initial_datum(c.u0, mesh, derive_seed(c.seed, 0xF1ULL, idx));
      const BrownianPath path =
          sample_brownian(derive_seed(c.seed, 0xF2ULL, idx), steps, c.dt);
      const double gap = flow_check(u_r, lo * c.dt, mid * c.dt, hi * c.dt, path,
                                    field, params, options_of(c));
      rows.push_back({"flow",
                      "rep=" + std::to_string(rep) + ";r=" + fmt(lo * c.dt) +
                          ";s=" + fmt(mid * c.dt) + ";t=" + fmt(hi * c.dt),
                      gap, slack, gap <= slack});
    }
  }

  const bool needs_observable =
      wants("ck") || wants("homogeneity") || wants("eprop") || wants("feller");
  if (needs_observable && c.observable.empty())
    throw ConfigError("markov estimator checks require 'observable'");

  if (wants("ck")) {
    const ObservableSpec obs = make_observable(c.observable);
    const GridFunction x = make_initial_datum(c.u0, mesh, c.seed);
    for (int rep = 0; rep < c.reps; ++rep) {
      const GapEstimate gap = chapman_kolmogorov_check(
          obs, x, c.r, c.s, t_end, setup, c.n_outer, c.n_inner,
          derive_seed(c.seed, 0xCCULL, static_cast<std::uint64_t>(rep)));
      rows.push_back({"ck",
                      "rep=" + std::to_string(rep) + ";r=" + fmt(c.r) +
                          ";s=" + fmt(c.s) + ";t=" + fmt(t_end) +
                          ";bias=uncorrected",
                      gap.gap, 4.0 * gap.combined_se,
                      gap.gap <= 4.0 * gap.combined_se});
    }
  }

  if (wants("homogeneity")) {
    const ObservableSpec obs = make_observable(c.observable);
    const GridFunction x = make_initial_datum(c.u0, mesh, c.seed);
    for (int rep = 0; rep < c.reps; ++rep) {
      const GapEstimate gap = homogeneity_check(
          obs, x, c.s, t_end, setup, c.n_samples,
          derive_seed(c.seed, 0xD0ULL, static_cast<std::uint64_t>(rep)));
      rows.push_back({"homogeneity",
                      "rep=" + std::to_string(rep) + ";s=" + fmt(c.s) +
                          ";t=" + fmt(t_end),
                      gap.gap, 4.0 * gap.combined_se,
                      gap.gap <= 4.0 * gap.combined_se});
    }
  }

  if (wants("eprop")) {
    const ObservableSpec obs = make_observable(c.observable);
    if (!obs.lipschitz_const)
      throw ConfigError("eprop requires a Lipschitz observable");
    for (int rep = 0; rep < c.reps; ++rep) {
      const auto idx = static_cast<std::uint64_t>(rep);
      const GridFunction x =
          make_initial_datum(c.u0, mesh, derive_seed(c.seed, 0xE0ULL, idx));
      const GridFunction z = make_initial_datum(
          c.v0.empty() ? c.u0 : c.v0, mesh, derive_seed(c.seed, 0xE1ULL, idx));
      const double excess =
          e_property_check(obs, x, z, c.s, t_end, setup, c.n_samples,
                           derive_seed(c.seed, 0xE2ULL, idx));
      const double threshold = *obs.lipschitz_const * slack;
      rows.push_back({"eprop", "rep=" + std::to_string(rep), excess, threshold,
                      excess <= threshold});
    }
  }

  if (wants("feller")) {
    const ObservableSpec obs = make_observable(c.observable);
    const GridFunction x = make_initial_datum(c.u0, mesh, c.seed);
    const GridFunction bump = make_initial_datum("eigenmode:1", mesh, c.seed);
    const auto points = feller_sequence(obs, x, bump, {0.5, 0.25, 0.125, 0.0625},
                                        c.s, t_end, setup, c.n_samples, c.seed);
    // monotone decrease up to the module-wide 4-standard-error band
    for (size_t j = 1; j < points.size(); ++j) {
      const double rise = points[j].gap - points[j - 1].gap;
      const double band =
          4.0 * std::sqrt(points[j].se * points[j].se +
                          points[j - 1].se * points[j - 1].se) +
          slack;
      rows.push_back({"feller", "delta=" + fmt(points[j].delta), rise, band,
                      rise <= band});
    }
  }

  const std::string path = ctx.path_of("markov.csv");
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "'");
  out << "check,params,value,threshold,passed\n";
  for (const auto& row : rows) {
    out << row.check << ',' << row.params << ',' << fmt(row.value) << ','
        << fmt(row.threshold) << ',' << (row.passed ? 1 : 0) << '\n';
    if (!row.passed)
      ctx.fail(row.check + " (" + row.params + "): value " + fmt(row.value) +
               " exceeds threshold " + fmt(row.threshold));
  }
  ctx.note("markov.csv");
}

void run_regularizer(CampaignContext& ctx) {
  const auto& c = ctx.config;
  if (c.input.empty() || c.levels.empty())
    throw ConfigError("regularizer requires 'input' and 'levels'");
  const Mesh mesh(c.dim, c.n);
  for (int level : c.levels)
    if (!(mesh.h < 1.0 / (2.0 * level)))
      std::cerr << "warning: level n=" << level
                << " is marginally resolved (h >= 1/(2n))\n";
  const NoiseField field = make_noise_field(c.input);
  const GridFunction v = sample_field(field, 0.0, mesh);
  const auto rows = pi_n_convergence_report(v, c.levels, c.p);
  write_convergence_csv(rows, ctx.path_of("regularizer.csv"));
  ctx.note("regularizer.csv");

  for (int level : c.levels) {
    const GridFunction pv = apply_pi_n(v, level, mesh);
    for (double q : {1.0, 2.0}) {
      if (norm_lq(pv, q) > norm_lq(v, q))
        ctx.fail("||Pi_n v||_" + fmt(q) + " exceeds ||v||_" + fmt(q) +
                 " at n=" + std::to_string(level));
    }
    const CutoffProfile cutoff = build_cutoff(level, mesh);
    const EdgeField slope = discrete_gradient(cutoff.values);
    double max_slope = 0.0;
    for (double g : slope.values) max_slope = std::max(max_slope, std::abs(g));
    // boundary-adjacent edges see the cutoff's own zero padding, so the
    // interior ramp bound applies with rounding slack only
    if (max_slope > 2.0 * level + 1e-9)
      ctx.fail("cutoff slope " + fmt(max_slope) + " exceeds 2n at n=" +
               std::to_string(level));
  }
  for (const std::string metric : {"1", "2"}) {
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& row : rows) {
      if (row.metric != metric) continue;
      if (!(row.discrepancy < prev))
        ctx.fail("L" + metric + " discrepancy not strictly decreasing at n=" +
                 std::to_string(row.n));
      prev = row.discrepancy;
    }
  }
}

}  // namespace

int run(const ExperimentConfig& config) {
  echo_keys(config.command);  // validates the command name
  std::error_code ec;
  fs::create_directories(config.out, ec);
  if (ec) throw IoError("cannot create output directory '" + config.out + "'");

  CampaignContext ctx{config, {}, {}};
  if (config.command == "simulate") run_simulate(ctx);
  else if (config.command == "verify-renorm") run_verify_renorm(ctx);
  else if (config.command == "verify-product") run_verify_product(ctx);
  else if (config.command == "verify-energy") run_verify_energy(ctx);
  else if (config.command == "markov") run_markov(ctx);
  else if (config.command == "regularizer") run_regularizer(ctx);

  write_manifest(ctx);
  if (!ctx.failures.empty()) {
    for (const auto& f : ctx.failures) std::cerr << "FAILED: " << f << "\n";
    return 1;
  }
  return 0;
}

}  // namespace rplap
