// Seeded Brownian increments and the deterministic bounded noise fields
// that drive the additive forcing. All sampling is bit-reproducible: a
// fixed mt19937_64 stream mapped through a fixed inverse-CDF normal.
#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "rplap/grid.hpp"

namespace rplap {

// Uniform in (0, 1), strictly: 53-bit mantissa offset by half an ulp.
inline double uniform01(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

struct BrownianPath {
  double dt = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> increments;  // each N(0, dt)

  int n_steps() const { return static_cast<int>(increments.size()); }
};

// Deterministic given (seed, n_steps, dt); rejects dt <= 0.
BrownianPath sample_brownian(std::uint64_t seed, int n_steps, double dt);

// Aggregates runs of `factor` consecutive increments, yielding the same
// Brownian motion on a coarser grid (refinement nesting).
BrownianPath coarsen(const BrownianPath& fine, int factor);

// SplitMix64 finalizer; the documented seed-splitting primitive.
std::uint64_t splitmix64(std::uint64_t x);

// Substream seed for ensemble member `index` of stream `stream` under a
// master seed. Estimator streams are tagged by their absolute start step so
// that identically configured estimators share paths.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                          std::uint64_t index);

// Quantile of the standard normal (Wichura's rational approximation);
// p in (0, 1).
double normal_quantile(double p);

// Bounded closed-form space-time field standing in for the predictable
// noise coefficient.
struct NoiseField {
  std::string label;
  double bound = 0.0;
  bool time_independent = true;
  std::function<double(double t, double x, double y)> eval;
};

// Registry: "zero", "const:<c>", "sinprod:<amplitude>", "space:<profile>"
// with profiles "sin" and "bump".
NoiseField make_noise_field(const std::string& spec);

// Values Phi(t, .) at the interior nodes.
GridFunction sample_field(const NoiseField& phi, double t, const Mesh& mesh);

// x -> Phi(t_n, x) * dbeta, left-endpoint evaluation.
GridFunction ito_forcing(const NoiseField& phi, double t_n, double dbeta,
                         const Mesh& mesh);

}  // namespace rplap
