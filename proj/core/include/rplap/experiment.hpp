// Batch experiment runner: key=value configs in, CSV reports and a
// rerunnable manifest out. Outputs are a pure function of (config, master
// seed); reruns are byte-identical.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rplap/grid.hpp"

namespace rplap {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};
struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ExperimentConfig {
  std::string command;

  int dim = 1;
  int n = 15;
  double T = 1.0;
  double dt = 1.0 / 64.0;
  double r = 0.0;

  double p = 2.0;
  double eps = 0.0;
  double newton_tol = 1e-10;
  int max_newton_iters = 200;

  std::string phi = "zero";
  std::uint64_t seed = 1;
  std::string u0 = "zero";
  std::string v0;

  std::string s_family;
  std::string psi;
  std::string h_family;
  std::string z_family;
  std::string observable;
  std::string input;
  std::string check = "all";

  int ensemble = 8;
  int n_outer = 64;
  int n_inner = 64;
  int n_samples = 64;
  int n_eval_times = 0;
  int reps = 1;

  double k = 1.0;
  std::vector<double> ks;
  std::vector<int> levels;
  std::vector<std::pair<int, double>> ladder;  // (n, dt) per refinement level
  double s = 0.0;
  double t = 0.0;
  double t_eval = -1.0;  // < 0 means "at T"

  std::string out = ".";
};

// Rejects unknown keys, duplicates and malformed values; '#' starts a
// comment line.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

// Canonical key=value echo of the fields the command consumes; parsing it
// back reproduces the run.
std::string canonical_config(const ExperimentConfig& config);

// Executes the campaign, writes its artifacts and the manifest into
// config.out. Returns 0 when every check passed, 1 otherwise.
int run(const ExperimentConfig& config);

// Initial-datum registry: "zero", "eigenmode:<amp>", "spike:<mass>",
// "step:<amp>", "random:<amp>". Deterministic in (spec, mesh, seed).
GridFunction make_initial_datum(const std::string& spec, const Mesh& mesh,
                                std::uint64_t seed);

// FNV-1a 64 content hash used for the manifest.
std::uint64_t fnv1a64(const std::string& bytes);
std::uint64_t hash_file(const std::string& path);

}  // namespace rplap
