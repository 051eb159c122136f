#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "rplap/grid.hpp"
#include "test_util.hpp"

using namespace rplap;

TEST_SUITE_BEGIN("grid");

TEST_CASE("mesh geometry") {
  const Mesh m1(1, 3);
  CHECK(m1.h == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(m1.n_nodes() == 3);
  CHECK(m1.n_edges() == 4);

  const Mesh m2(2, 3);
  CHECK(m2.n_nodes() == 9);
  CHECK(m2.n_edges() == 24);
  // row-major ordering: node 4 is the center of the 3x3 grid
  CHECK(m2.node_coord(4)[0] == doctest::Approx(0.5));
  CHECK(m2.node_coord(4)[1] == doctest::Approx(0.5));
  CHECK(m2.boundary_distance(0) == doctest::Approx(0.25));

  CHECK_THROWS_AS(Mesh(3, 3), std::invalid_argument);
  CHECK_THROWS_AS(Mesh(1, 0), std::invalid_argument);
}

TEST_CASE("gradient difference quotients with zero boundary") {
  const Mesh mesh(1, 3);
  const auto u = testutil::from_values(mesh, {0.25, 0.5, 0.75});
  const EdgeField g = discrete_gradient(u);
  REQUIRE(g.size() == 4);
  CHECK(g[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(g[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(g[2] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(g[3] == doctest::Approx(-3.0).epsilon(1e-14));
}

TEST_CASE("gradient of zero and of a constant") {
  const Mesh fine(1, 7);
  const EdgeField gz = discrete_gradient(GridFunction(fine));
  for (int e = 0; e < gz.size(); ++e) CHECK(gz[e] == 0.0);

  // constant c on n=1: only boundary-adjacent edges are nonzero
  const Mesh tiny(1, 1);
  const double c = 0.7;
  const EdgeField gc = discrete_gradient(testutil::from_values(tiny, {c}));
  CHECK(gc[0] == doctest::Approx(2.0 * c).epsilon(1e-14));
  CHECK(gc[1] == doctest::Approx(-2.0 * c).epsilon(1e-14));

  // in general, grad of a constant vanishes on interior edges
  GridFunction cst(fine, 1.3);
  const EdgeField g = discrete_gradient(cst);
  const auto edges = make_edges(fine);
  for (size_t e = 0; e < edges.size(); ++e) {
    if (edges[e].a >= 0 && edges[e].b >= 0)
      CHECK(g.values[e] == 0.0);
    else
      CHECK(g.values[e] != 0.0);
  }
}

TEST_CASE("divergence example fixed by the adjointness convention") {
  const Mesh mesh(1, 3);
  EdgeField F(mesh);
  F[0] = 1.0;
  F[1] = 1.0;
  F[2] = 1.0;
  F[3] = -3.0;
  const GridFunction d = discrete_divergence(F);
  // (F_{i+1} - F_i)/h per node; last node (-3 - 1)/0.25
  CHECK(d[0] == doctest::Approx(0.0));
  CHECK(d[1] == doctest::Approx(0.0));
  CHECK(d[2] == doctest::Approx(-16.0).epsilon(1e-14));

  const GridFunction z = discrete_divergence(EdgeField(mesh));
  for (int i = 0; i < z.size(); ++i) CHECK(z[i] == 0.0);
}

TEST_CASE("summation by parts on random pairs, 1d and 2d") {
  std::mt19937_64 rng(0xABCDEFULL);
  for (const Mesh mesh : {Mesh(1, 63), Mesh(2, 15)}) {
    for (int trial = 0; trial < 100; ++trial) {
      const GridFunction u = testutil::random_grid_function(mesh, rng);
      const EdgeField F = testutil::random_edge_field(mesh, rng);
      const double lhs = inner_nodes(discrete_divergence(F), u);
      const double rhs = inner_edges(F, discrete_gradient(u));
      CHECK(std::abs(lhs + rhs) <=
            1e-12 * (std::abs(lhs) + std::abs(rhs) + 1e-30));
    }
  }
}

TEST_CASE("norms") {
  const Mesh mesh(1, 3);
  CHECK(norm_lq(GridFunction(mesh), 1.0) == 0.0);
  CHECK(norm_lq(testutil::from_values(mesh, {1, 1, 1}), 1.0) ==
        doctest::Approx(0.75).epsilon(1e-15));
  const Mesh tiny(1, 1);
  CHECK(norm_lq(testutil::from_values(tiny, {2}), 2.0) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK_THROWS_AS(norm_lq(GridFunction(mesh), 0.5), std::invalid_argument);
}

TEST_CASE("norm homogeneity and triangle inequality on random samples") {
  std::mt19937_64 rng(0x5EEDULL);
  const Mesh mesh(2, 7);
  for (int trial = 0; trial < 25; ++trial) {
    const GridFunction u = testutil::random_grid_function(mesh, rng);
    const GridFunction v = testutil::random_grid_function(mesh, rng);
    const double c = 4.0 * rplap::uniform01(rng) - 2.0;
    for (double q : {1.0, 2.0, 3.5}) {
      GridFunction cu = u;
      for (auto& x : cu.values) x *= c;
      CHECK(norm_lq(cu, q) ==
            doctest::Approx(std::abs(c) * norm_lq(u, q)).epsilon(1e-12));
      GridFunction sum = u;
      for (int i = 0; i < sum.size(); ++i) sum[i] += v[i];
      CHECK(norm_lq(sum, q) <= norm_lq(u, q) + norm_lq(v, q) + 1e-12);
    }
  }
}

TEST_SUITE_END();
