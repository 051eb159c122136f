// Microbenchmarks for the hot paths: operator application, implicit steps
// and whole-path solves.

#include <benchmark/benchmark.h>

#include <random>

#include "rplap/noise.hpp"
#include "rplap/plap.hpp"
#include "rplap/stepper.hpp"

using namespace rplap;

namespace {

GridFunction random_gf(const Mesh& mesh, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  GridFunction u(mesh);
  for (int i = 0; i < u.size(); ++i) u[i] = 2.0 * uniform01(rng) - 1.0;
  return u;
}

void BM_ApplyPlap1D(benchmark::State& state) {
  const Mesh mesh(1, static_cast<int>(state.range(0)));
  const GridFunction u = random_gf(mesh, 1);
  const PlapParams params{3.0, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(apply_plap(u, params));
}
BENCHMARK(BM_ApplyPlap1D)->Arg(63)->Arg(255)->Arg(1023);

void BM_ApplyPlap2D(benchmark::State& state) {
  const Mesh mesh(2, static_cast<int>(state.range(0)));
  const GridFunction u = random_gf(mesh, 2);
  const PlapParams params{3.0, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(apply_plap(u, params));
}
BENCHMARK(BM_ApplyPlap2D)->Arg(15)->Arg(31)->Arg(63);

void BM_ImplicitStep(benchmark::State& state) {
  const Mesh mesh(1, static_cast<int>(state.range(0)));
  const GridFunction u = random_gf(mesh, 3);
  const double p = state.range(1) == 0 ? 1.5 : 3.0;
  const PlapParams params{p, p < 2.0 ? 1e-3 : 0.0};
  for (auto _ : state)
    benchmark::DoNotOptimize(
        implicit_step(u, 1.0 / 256.0, GridFunction(mesh), params, {}));
}
BENCHMARK(BM_ImplicitStep)->Args({31, 0})->Args({31, 1})->Args({127, 0})->Args({127, 1});

void BM_SolvePath(benchmark::State& state) {
  const Mesh mesh(1, 31);
  const GridFunction u = random_gf(mesh, 4);
  const BrownianPath path = sample_brownian(7, 64, 1.0 / 64.0);
  const NoiseField phi = make_noise_field("const:0.2");
  const PlapParams params{3.0, 0.0};
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_path(u, 0.0, 1.0, path, phi, params, {}));
}
BENCHMARK(BM_SolvePath);

}  // namespace

BENCHMARK_MAIN();
