#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "rplap/markov.hpp"
#include "test_util.hpp"

using namespace rplap;

namespace {

MarkovSetup basic_setup(const std::string& phi = "const:0.2") {
  return {1.0 / 32.0, make_noise_field(phi), {2.0, 0.0}, {}};
}

}  // namespace

TEST_SUITE_BEGIN("markov");

TEST_CASE("observable registry") {
  const Mesh mesh(1, 7);
  const ObservableSpec clipped = make_observable("clipped_l1");
  GridFunction big(mesh, 100.0);
  CHECK(clipped.eval(big) == 1.0);
  CHECK(clipped.eval(GridFunction(mesh)) == 0.0);
  CHECK(clipped.lipschitz_const.value() == 1.0);

  const ObservableSpec c = make_observable("const:0.7");
  CHECK(c.eval(big) == 0.7);
  CHECK(c.lipschitz_const.value() == 0.0);

  const ObservableSpec cyl = make_observable("cyl_sin:2");
  CHECK(std::abs(cyl.eval(big)) <= 1.0);
  CHECK_THROWS_AS(make_observable("entropy"), std::invalid_argument);
}

TEST_CASE("observable lipschitz audit on random pairs") {
  const Mesh mesh(1, 15);
  std::mt19937_64 rng(0x11);
  for (const std::string label : {"clipped_l1", "cyl_sin:2"}) {
    const ObservableSpec obs = make_observable(label);
    for (int trial = 0; trial < 40; ++trial) {
      const GridFunction a = testutil::random_grid_function(mesh, rng, 2.0);
      const GridFunction b = testutil::random_grid_function(mesh, rng, 2.0);
      GridFunction diff(mesh);
      for (int i = 0; i < mesh.n_nodes(); ++i) diff[i] = a[i] - b[i];
      CHECK(std::abs(obs.eval(a) - obs.eval(b)) <=
            obs.lipschitz_const.value() * norm_lq(diff, 1.0) + 1e-12);
      CHECK(std::abs(obs.eval(a)) <= obs.bound + 1e-12);
    }
  }
}

TEST_CASE("contraction for equal data and for the linear case") {
  const Mesh mesh(1, 15);
  std::mt19937_64 rng(0x21);
  const GridFunction u0 = testutil::random_grid_function(mesh, rng);
  const BrownianPath path = sample_brownian(77, 16, 1.0 / 32.0);
  const NoiseField phi = make_noise_field("space:sin");
  const SolverOptions opts;

  CHECK(contraction_check(u0, u0, path, phi, {2.0, 0.0}, opts) <=
        10.0 * mesh.n_nodes() * opts.newton_tol);

  // p = 2: the difference solves the heat equation, strictly contracting
  const GridFunction v0 = testutil::random_grid_function(mesh, rng);
  const double excess = contraction_check(u0, v0, path, phi, {2.0, 0.0}, opts);
  CHECK(excess < 0.0);
}

TEST_CASE("contraction excess within tolerance across p") {
  const Mesh mesh(1, 15);
  std::mt19937_64 rng(0x22);
  const SolverOptions opts;
  const double slack = 10.0 * mesh.n_nodes() * opts.newton_tol;
  for (double p : {1.5, 3.0}) {
    const PlapParams params{p, p < 2.0 ? 1e-3 : 0.0};
    for (int trial = 0; trial < 5; ++trial) {
      const GridFunction u0 = testutil::random_grid_function(mesh, rng, 2.0);
      const GridFunction v0 = testutil::random_grid_function(mesh, rng, 2.0);
      const BrownianPath path =
          sample_brownian(1000 + trial, 16, 1.0 / 32.0);
      const double excess = contraction_check(
          u0, v0, path, make_noise_field("const:0.3"), params, opts);
      CHECK(excess <= slack);
    }
  }
}

TEST_CASE("flow composition collapses in the trivial cases") {
  const Mesh mesh(1, 7);
  std::mt19937_64 rng(0x23);
  const GridFunction u0 = testutil::random_grid_function(mesh, rng);
  const BrownianPath path = sample_brownian(5, 16, 1.0 / 32.0);
  const NoiseField phi = make_noise_field("const:0.5");
  const SolverOptions opts;
  const double slack = 10.0 * mesh.n_nodes() * opts.newton_tol;
  CHECK(flow_check(u0, 0.0, 0.0, 0.5, path, phi, {2.0, 0.0}, opts) <= slack);
  CHECK(flow_check(u0, 0.0, 0.5, 0.5, path, phi, {2.0, 0.0}, opts) <= slack);
  CHECK(flow_check(u0, 0.0, 0.25, 0.5, path, phi, {1.5, 1e-3}, opts) <= slack);
  CHECK_THROWS_AS(flow_check(u0, 0.5, 0.25, 0.0, path, phi, {2.0, 0.0}, opts),
                  std::invalid_argument);
}

TEST_CASE("semigroup estimate degenerate cases") {
  const Mesh mesh(1, 7);
  std::mt19937_64 rng(0x24);
  const GridFunction x = testutil::random_grid_function(mesh, rng);
  const MarkovSetup setup = basic_setup();

  // s == t: identity semigroup, zero variance
  const ObservableSpec clipped = make_observable("clipped_l1");
  const SemigroupEstimate idem =
      semigroup_estimate(clipped, x, 0.25, 0.25, setup, 8, 99);
  CHECK(idem.value == doctest::Approx(clipped.eval(x)));
  CHECK(idem.std_error == 0.0);

  // constant observable: exact value, zero std error
  const SemigroupEstimate cst =
      semigroup_estimate(make_observable("const:0.7"), x, 0.0, 0.25, setup, 8, 99);
  CHECK(cst.value == doctest::Approx(0.7));
  CHECK(cst.std_error <= 1e-15);

  // deterministic dynamics: zero-variance estimate
  const MarkovSetup quiet = basic_setup("zero");
  const SemigroupEstimate det =
      semigroup_estimate(clipped, x, 0.0, 0.25, quiet, 4, 99);
  CHECK(det.std_error == 0.0);

  CHECK_THROWS_AS(semigroup_estimate(clipped, x, 0.0, 0.25, setup, 1, 99),
                  std::invalid_argument);
}

TEST_CASE("estimates are reproducible functions of the master seed") {
  const Mesh mesh(1, 7);
  std::mt19937_64 rng(0x25);
  const GridFunction x = testutil::random_grid_function(mesh, rng);
  const MarkovSetup setup = basic_setup();
  const ObservableSpec obs = make_observable("cyl_sin:1");
  const SemigroupEstimate a = semigroup_estimate(obs, x, 0.0, 0.5, setup, 16, 7);
  const SemigroupEstimate b = semigroup_estimate(obs, x, 0.0, 0.5, setup, 16, 7);
  CHECK(a.value == b.value);
  CHECK(a.std_error == b.std_error);
  const SemigroupEstimate c = semigroup_estimate(obs, x, 0.0, 0.5, setup, 16, 8);
  CHECK(a.value != c.value);
}

TEST_CASE("chapman-kolmogorov gap within the combined error band") {
  const Mesh mesh(1, 15);
  GridFunction x(mesh);
  for (int i = 0; i < x.size(); ++i)
    x[i] = std::sin(M_PI * mesh.node_coord(i)[0]);
  const MarkovSetup setup = basic_setup();
  const ObservableSpec obs = make_observable("clipped_l1");
  const GapEstimate gap =
      chapman_kolmogorov_check(obs, x, 0.0, 0.25, 0.5, setup, 32, 32, 12345);
  CHECK(gap.combined_se > 0.0);
  CHECK(gap.gap <= 4.0 * gap.combined_se);

  // constant observable: gap is exactly zero
  const GapEstimate zero_gap = chapman_kolmogorov_check(
      make_observable("const:1"), x, 0.0, 0.25, 0.5, setup, 4, 4, 1);
  CHECK(zero_gap.gap == 0.0);

  // s == r: the nested estimator collapses to a direct one; only
  // seed-derivation differences remain
  const GapEstimate collapsed =
      chapman_kolmogorov_check(obs, x, 0.25, 0.25, 0.5, setup, 16, 16, 7);
  CHECK(collapsed.gap <= 4.0 * collapsed.combined_se);
}

TEST_CASE("homogeneity shares paths at s=0 and rejects time dependence") {
  const Mesh mesh(1, 7);
  std::mt19937_64 rng(0x26);
  const GridFunction x = testutil::random_grid_function(mesh, rng);
  const MarkovSetup setup = basic_setup();
  const ObservableSpec obs = make_observable("clipped_l1");

  const GapEstimate at_zero = homogeneity_check(obs, x, 0.0, 0.5, setup, 8, 4);
  CHECK(at_zero.gap == 0.0);

  const MarkovSetup quiet = basic_setup("zero");
  const GapEstimate det = homogeneity_check(obs, x, 0.25, 0.5, quiet, 4, 4);
  CHECK(det.gap == 0.0);

  const MarkovSetup timevar{1.0 / 32.0, make_noise_field("sinprod:1"),
                            {2.0, 0.0}, {}};
  CHECK_THROWS_AS(homogeneity_check(obs, x, 0.25, 0.5, timevar, 4, 4),
                  std::invalid_argument);

  const GapEstimate shifted = homogeneity_check(obs, x, 0.25, 0.75, setup, 48, 4);
  CHECK(shifted.gap <= 4.0 * shifted.combined_se);
}

TEST_CASE("e-property excess under common-path coupling") {
  const Mesh mesh(1, 15);
  std::mt19937_64 rng(0x27);
  const MarkovSetup setup = basic_setup();
  const ObservableSpec obs = make_observable("clipped_l1");
  const SolverOptions opts;
  const double slack =
      obs.lipschitz_const.value() * 10.0 * mesh.n_nodes() * opts.newton_tol;

  const GridFunction x = testutil::random_grid_function(mesh, rng, 1.5);
  CHECK(e_property_check(obs, x, x, 0.0, 0.5, setup, 8, 3) <= 0.0 + slack);

  for (int trial = 0; trial < 5; ++trial) {
    const GridFunction a = testutil::random_grid_function(mesh, rng, 1.5);
    const GridFunction b = testutil::random_grid_function(mesh, rng, 1.5);
    CHECK(e_property_check(obs, a, b, 0.0, 0.5, setup, 8, trial) <= slack);
  }

  // constant observable: |0| - L||x-z|| stays nonpositive
  const ObservableSpec cst = make_observable("const:2");
  const GridFunction a = testutil::random_grid_function(mesh, rng);
  const GridFunction b = testutil::random_grid_function(mesh, rng);
  CHECK(e_property_check(cst, a, b, 0.0, 0.5, setup, 4, 3) <= 0.0);

  const ObservableSpec no_lip{"raw", 1.0, std::nullopt,
                              [](const GridFunction&) { return 0.0; }};
  CHECK_THROWS_AS(e_property_check(no_lip, a, b, 0.0, 0.5, setup, 4, 3),
                  std::invalid_argument);
}

TEST_CASE("feller surrogate: coupled estimates converge along perturbations") {
  const Mesh mesh(1, 15);
  const MarkovSetup setup = basic_setup();
  const ObservableSpec obs = make_observable("clipped_l1");
  GridFunction x(mesh);
  GridFunction bump(mesh);
  for (int i = 0; i < x.size(); ++i) {
    const double c = mesh.node_coord(i)[0];
    x[i] = 0.4 * std::sin(M_PI * c);
    bump[i] = std::sin(M_PI * c);
  }
  const double slack = 10.0 * mesh.n_nodes() * setup.opts.newton_tol;
  const std::vector<double> deltas{0.5, 0.25, 0.125, 0.0625};
  const auto points =
      feller_sequence(obs, x, bump, deltas, 0.0, 0.5, setup, 16, 42);
  REQUIRE(points.size() == 4);
  for (size_t j = 1; j < points.size(); ++j) {
    const double band = 4.0 * std::sqrt(points[j].se * points[j].se +
                                        points[j - 1].se * points[j - 1].se);
    CHECK(points[j].gap <= points[j - 1].gap + band + slack);
  }
  // each gap obeys the pathwise contraction envelope
  for (const auto& point : points)
    CHECK(point.gap <=
          obs.lipschitz_const.value() * point.delta * norm_lq(bump, 1.0) + slack);
}

TEST_SUITE_END();
