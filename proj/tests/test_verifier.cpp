#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "rplap/verifier.hpp"
#include "test_util.hpp"

using namespace rplap;

namespace {

ScalarFamily constant_family(double c) {
  return {"const", FamilyClass::w2inf, 0.0, {},
          [c](double) { return c; },
          [](double) { return 0.0; },
          [](double) { return 0.0; }};
}

TestFunctionSpec zero_test_function() {
  auto zero = [](double, double, double) { return 0.0; };
  return {"zerofn", true, zero, zero, zero, zero};
}

Trajectory small_trajectory(std::uint64_t seed, double u0_amp, double p = 2.0) {
  const Mesh mesh(1, 3);
  std::mt19937_64 rng(seed);
  const GridFunction u0 = testutil::random_grid_function(mesh, rng, u0_amp);
  const BrownianPath path = sample_brownian(seed, 4, 0.125);
  return solve_path(u0, 0.0, 0.5, path, make_noise_field("const:0.4"),
                    {p, 0.0}, {});
}

}  // namespace

TEST_SUITE_BEGIN("verifier");

TEST_CASE("test function registry") {
  const TestFunctionSpec one = make_test_function("one");
  CHECK(one.value(0.3, 0.4, 0.0) == 1.0);
  CHECK_FALSE(one.vanishes_on_boundary);
  const TestFunctionSpec sin = make_test_function("space_sin");
  CHECK(sin.vanishes_on_boundary);
  CHECK(sin.value(0.0, 0.5, 0.0) == doctest::Approx(1.0));
  CHECK(sin.ddx(0.0, 0.5, 0.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(make_test_function("psi42"), std::invalid_argument);
}

TEST_CASE("constant S with time-independent psi gives zero residual") {
  const Trajectory traj = small_trajectory(3, 1.0);
  const ResidualReport report =
      renorm_residual(traj, constant_family(2.5), make_test_function("space_sin"),
                      0.5);
  CHECK(report.residual <= 1e-12);
}

TEST_CASE("zero test function gives zero residual") {
  const Trajectory traj = small_trajectory(4, 1.0);
  const ResidualReport report = renorm_residual(
      traj, make_family("compact_s:1:3"), zero_test_function(), 0.5);
  CHECK(report.residual == 0.0);
}

TEST_CASE("admissibility and grid errors") {
  const Trajectory traj = small_trajectory(5, 1.0);
  // tk has d1(0) = 1, so a non-vanishing test function is rejected
  CHECK_THROWS_AS(
      renorm_residual(traj, make_family("tk:1"), make_test_function("one"), 0.5),
      InadmissiblePairError);
  CHECK_NOTHROW(renorm_residual(traj, make_family("tk:1"),
                                make_test_function("space_sin"), 0.5));
  CHECK_THROWS_AS(renorm_residual(traj, make_family("compact_s:1:3"),
                                  make_test_function("one"), 0.3),
                  OffGridError);
}

TEST_CASE("breakdown sums to the reported residual") {
  const Trajectory traj = small_trajectory(6, 2.0);
  const ResidualReport report = renorm_residual(
      traj, make_family("compact_s:1:3"), make_test_function("one"), 0.5);
  REQUIRE(report.terms.size() == 6);
  const double lhs =
      report.terms[0].second + report.terms[1].second + report.terms[2].second;
  const double rhs =
      report.terms[3].second + report.terms[4].second + report.terms[5].second;
  CHECK(std::abs((lhs - rhs) - (report.lhs - report.rhs)) <= 1e-12);
  CHECK(report.residual == std::abs(report.lhs - report.rhs));
  CHECK(report.terms[0].first == "term_S_endpoints");
  CHECK(report.terms[5].first == "term_Spp_phi2");
}

TEST_CASE("renorm residual shrinks under refinement") {
  const NoiseField phi = make_noise_field("const:0.2");
  const ScalarFamily fam = make_family("compact_s:1:3");
  const TestFunctionSpec psi = make_test_function("one");
  const BrownianPath fine = sample_brownian(12, 256, 1.0 / 256.0);
  double prev = 1e300;
  for (const auto& [n, factor] : std::vector<std::pair<int, int>>{{15, 8}, {31, 2}}) {
    const Mesh mesh(1, n);
    GridFunction u0(mesh);
    for (int i = 0; i < u0.size(); ++i)
      u0[i] = 2.0 * std::sin(M_PI * mesh.node_coord(i)[0]);
    const BrownianPath path = coarsen(fine, factor);
    const Trajectory traj = solve_path(u0, 0.0, 1.0, path, phi, {2.0, 0.0}, {});
    const ResidualReport report = renorm_residual(traj, fam, psi, 1.0);
    CHECK(report.residual < prev);
    prev = report.residual;
  }
}

TEST_CASE("product rule residual vanishes for coupled equal data") {
  const Mesh mesh(1, 7);
  std::mt19937_64 rng(9);
  const GridFunction u0 = testutil::random_grid_function(mesh, rng, 2.0);
  const BrownianPath path = sample_brownian(31, 8, 0.125);
  const NoiseField phi = make_noise_field("const:0.3");
  const Trajectory u = solve_path(u0, 0.0, 1.0, path, phi, {2.0, 0.0}, {});
  const ResidualReport report = ito_product_residual(
      u, u, make_family("tssigma:1:0.5"), make_family("compact_s:1:3"), 1.0);
  CHECK(report.residual == 0.0);
}

TEST_CASE("product rule coupling and admissibility errors") {
  const Trajectory a = small_trajectory(10, 1.0);
  const Trajectory b = small_trajectory(11, 1.0);  // different path seed
  CHECK_THROWS_AS(ito_product_residual(a, b, make_family("tssigma:1:0.5"),
                                       make_family("compact_s:1:3"), 0.5),
                  MismatchedCouplingError);
  // tk value(0)=0 but d1(0)=1: rejected as Z
  CHECK_THROWS_AS(ito_product_residual(a, a, make_family("tssigma:1:0.5"),
                                       make_family("tk:1"), 0.5),
                  InadmissibleZError);
}

TEST_CASE("product rule residual shrinks under refinement") {
  const NoiseField phi = make_noise_field("const:0.2");
  const ScalarFamily h_fam = make_family("tssigma:1:0.5");
  const ScalarFamily z_fam = make_family("compact_s:1:3");
  const BrownianPath fine = sample_brownian(13, 256, 1.0 / 256.0);
  double prev = 1e300;
  for (const auto& [n, factor] : std::vector<std::pair<int, int>>{{15, 8}, {31, 2}}) {
    const Mesh mesh(1, n);
    GridFunction u0(mesh), v0(mesh);
    for (int i = 0; i < u0.size(); ++i) {
      const double x = mesh.node_coord(i)[0];
      u0[i] = 2.0 * std::sin(M_PI * x);
      v0[i] = 1.5 * std::sin(2.0 * M_PI * x);
    }
    const BrownianPath path = coarsen(fine, factor);
    const Trajectory u = solve_path(u0, 0.0, 1.0, path, phi, {2.0, 0.0}, {});
    const Trajectory v = solve_path(v0, 0.0, 1.0, path, phi, {2.0, 0.0}, {});
    const ResidualReport report = ito_product_residual(u, v, h_fam, z_fam, 1.0);
    CHECK(report.residual < prev);
    prev = report.residual;
  }
}

TEST_CASE("truncation energy against a dense recomputation") {
  const Trajectory traj = small_trajectory(14, 3.0, 2.0);
  const double k = 1.0;
  const TruncationEnergy te = truncation_energy({traj}, k);

  // independent accumulation straight from the definition
  const Mesh& mesh = traj.mesh;
  double energy = 0.0, chi = 0.0;
  for (int n = 0; n < traj.n_steps(); ++n) {
    const GridFunction& u = traj.states[n];
    double prev_trunc = 0.0;
    for (int i = 0; i <= mesh.n_nodes(); ++i) {
      const double cur = i < mesh.n_nodes() ? std::clamp(u[i], -k, k) : 0.0;
      const double g = (cur - prev_trunc) / mesh.h;
      energy += traj.dt * mesh.h * g * g;  // p = 2
      prev_trunc = cur;
    }
    for (int i = 0; i < mesh.n_nodes(); ++i)
      if (std::abs(u[i]) < k) chi += traj.dt * mesh.h * 0.16;  // phi = 0.4
  }
  double tilde = 0.0;
  for (int i = 0; i < mesh.n_nodes(); ++i)
    tilde += mesh.h * (tilde_t_k(traj.final()[i], k) -
                       tilde_t_k(traj.initial()[i], k));
  CHECK(te.energy == doctest::Approx(energy).epsilon(1e-12));
  CHECK(te.bound_surrogate == doctest::Approx(tilde + 0.5 * chi).epsilon(1e-12));
}

TEST_CASE("truncation energy trivial cases") {
  const Mesh mesh(1, 7);
  const BrownianPath path = sample_brownian(15, 8, 0.125);
  const Trajectory zero = solve_path(GridFunction(mesh), 0.0, 1.0, path,
                                     make_noise_field("zero"), {2.0, 0.0}, {});
  CHECK(truncation_energy({zero}, 1.0).energy == 0.0);

  // k above the sup norm: truncation inactive, equals the untruncated energy
  const Trajectory traj = small_trajectory(16, 0.5);
  double sup = 0.0;
  for (const auto& state : traj.states) sup = std::max(sup, norm_sup(state));
  const double k_big = sup + 1.0;
  double raw = 0.0;
  for (int n = 0; n < traj.n_steps(); ++n) {
    const EdgeField g = discrete_gradient(traj.states[n]);
    for (int e = 0; e < g.size(); ++e)
      raw += traj.dt * traj.mesh.h * g[e] * g[e];
  }
  CHECK(truncation_energy({traj}, k_big).energy == doctest::Approx(raw).epsilon(1e-13));
}

TEST_CASE("dissipation profile tail and brute force") {
  const Trajectory traj = small_trajectory(17, 3.0);
  double sup = 0.0;
  for (const auto& state : traj.states) sup = std::max(sup, norm_sup(state));
  const auto profile = dissipation_profile({traj}, {0.1, 0.5, sup + 1.0});
  REQUIRE(profile.size() == 3);
  for (const auto& [k, value] : profile) CHECK(value >= 0.0);
  CHECK(profile.back().second == 0.0);

  // dense recomputation of the first band
  const double k = 0.1;
  const Mesh& mesh = traj.mesh;
  double want = 0.0;
  for (int n = 0; n < traj.n_steps(); ++n) {
    const GridFunction& u = traj.states[n];
    for (int i = 0; i + 1 < mesh.n_nodes(); ++i) {
      const double va = std::abs(u[i]), vb = std::abs(u[i + 1]);
      if (va > k && va < k + 1.0 && vb > k && vb < k + 1.0) {
        const double g = (u[i + 1] - u[i]) / mesh.h;
        want += traj.dt * mesh.h * g * g;
      }
    }
  }
  CHECK(profile.front().second == doctest::Approx(want).epsilon(1e-12));
  CHECK_THROWS_AS(dissipation_profile({traj}, {1.0, 0.5}), std::invalid_argument);
}

TEST_CASE("residual evaluators on the unit square") {
  const Mesh mesh(2, 5);
  GridFunction u0(mesh);
  for (int i = 0; i < u0.size(); ++i) {
    const auto c = mesh.node_coord(i);
    u0[i] = 2.0 * std::sin(M_PI * c[0]) * std::sin(M_PI * c[1]);
  }
  const BrownianPath path = sample_brownian(41, 8, 1.0 / 16.0);
  const NoiseField phi = make_noise_field("space:sin");
  const Trajectory traj = solve_path(u0, 0.0, 0.5, path, phi, {3.0, 0.0}, {});

  // constant S still cancels exactly against a time-independent psi
  const ResidualReport flat = renorm_residual(
      traj, constant_family(1.5), make_test_function("space_sin"), 0.5);
  CHECK(flat.residual <= 1e-12);

  // breakdown consistency with an active family and a spatial gradient
  const ResidualReport report = renorm_residual(
      traj, make_family("compact_s:1:3"), make_test_function("space_sin"), 0.5);
  const double lhs =
      report.terms[0].second + report.terms[1].second + report.terms[2].second;
  const double rhs =
      report.terms[3].second + report.terms[4].second + report.terms[5].second;
  CHECK(report.residual == std::abs(report.lhs - report.rhs));
  CHECK(std::abs((lhs - rhs) - (report.lhs - report.rhs)) <= 1e-12);
  CHECK(report.terms[1].second != 0.0);  // grad-psi term active in 2d

  const Trajectory other = solve_path(u0, 0.0, 0.5, path, phi, {3.0, 0.0}, {});
  const ResidualReport prod = ito_product_residual(
      traj, other, make_family("tssigma:1:0.5"), make_family("compact_s:1:3"),
      0.5);
  CHECK(prod.residual == 0.0);  // identical coupled trajectories
}

TEST_CASE("dissipation band starting at zero") {
  const Trajectory traj = small_trajectory(19, 0.4);
  const auto profile = dissipation_profile({traj}, {0.0});
  REQUIRE(profile.size() == 1);
  // all interior values lie in (0,1), so the band carries the full energy
  double want = 0.0;
  const Mesh& mesh = traj.mesh;
  for (int n = 0; n < traj.n_steps(); ++n) {
    const GridFunction& u = traj.states[n];
    for (int i = 0; i + 1 < mesh.n_nodes(); ++i) {
      const double va = std::abs(u[i]), vb = std::abs(u[i + 1]);
      if (va > 0.0 && va < 1.0 && vb > 0.0 && vb < 1.0) {
        const double g = (u[i + 1] - u[i]) / mesh.h;
        want += traj.dt * mesh.h * g * g;
      }
    }
  }
  CHECK(profile.front().second == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("generalized gradient is level-independent inside the band") {
  const Mesh mesh(1, 15);
  std::mt19937_64 rng(18);
  const GridFunction u = testutil::random_grid_function(mesh, rng, 3.0);
  const double k = 1.0;
  const auto edges = make_edges(mesh);
  GridFunction tk_u(mesh), tkp_u(mesh);
  for (double kp : {1.5, 2.0, 5.0}) {
    for (int i = 0; i < mesh.n_nodes(); ++i) {
      tk_u[i] = t_k(u[i], k);
      tkp_u[i] = t_k(u[i], kp);
    }
    const EdgeField gk = discrete_gradient(tk_u);
    const EdgeField gkp = discrete_gradient(tkp_u);
    for (size_t e = 0; e < edges.size(); ++e) {
      const double va = edges[e].a < 0 ? 0.0 : std::abs(u[edges[e].a]);
      const double vb = edges[e].b < 0 ? 0.0 : std::abs(u[edges[e].b]);
      if (va < k && vb < k) CHECK(gk.values[e] == gkp.values[e]);
    }
  }
}

TEST_SUITE_END();
