#include <cmath>
#include <random>

#include "doctest.h"
#include "nlpf/error.hpp"
#include "nlpf/grid.hpp"

using namespace nlpf;

TEST_SUITE("grid") {
  TEST_CASE("node counts and layer width") {
    const Grid g = build_grid(1, 0.25, 0.5);
    CHECK(g.num_interior() == 5);
    CHECK(g.layer == 2);
    CHECK(g.num_exterior() == 4);
    for (std::size_t i = 0; i < g.num_interior(); ++i) {
      CHECK(g.coord(g.interior_ids[i], 0) == doctest::Approx(0.25 * i));
    }

    CHECK(build_grid(1, 0.0024, 0.1540).layer == 65);

    const Grid g3 = build_grid(2, 0.0048, 0.0826);
    CHECK(g3.cells == 208);
    CHECK(g3.n_per_axis() == 209);
    CHECK(g3.layer == 18);
    CHECK(g3.snapped());
    CHECK(g3.num_interior() == 209u * 209u);
  }

  TEST_CASE("local grids have no layer") {
    const Grid g = build_grid(2, 0.1, 0.0);
    CHECK(g.layer == 0);
    CHECK(g.num_exterior() == 0);
    CHECK(g.num_nodes() == 121);
  }

  TEST_CASE("invalid grids throw") {
    CHECK_THROWS_AS(build_grid(3, 0.1, 0.0), Error);
    CHECK_THROWS_AS(build_grid(1, 0.0, 0.0), Error);
    CHECK_THROWS_AS(build_grid(2, 1e-5, 0.5), Error);
  }

  TEST_CASE("stiffness by hand in 1D") {
    const Grid g = build_grid(1, 0.5, 0.0);
    const auto K = assemble_stiffness(g);
    const double expected[3][3] = {{2, -2, 0}, {-2, 4, -2}, {0, -2, 2}};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) CHECK(K.at(r, c) == doctest::Approx(expected[r][c]));
    }
  }

  TEST_CASE("stiffness annihilates constants and is positive semidefinite") {
    for (int dim : {1, 2}) {
      const Grid g = build_grid(dim, 0.125, 0.3);
      const auto K = assemble_stiffness(g);
      const std::vector<double> ones(g.num_interior(), 1.0);
      for (double v : K * ones) CHECK(std::abs(v) <= 1e-12);
      std::mt19937_64 rng(3);
      std::normal_distribution<double> N;
      for (int t = 0; t < 100; ++t) {
        std::vector<double> x(g.num_interior());
        for (auto& v : x) v = N(rng);
        const auto Kx = K * x;
        double q = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) q += x[i] * Kx[i];
        CHECK(q >= -1e-12);
      }
    }
  }

  TEST_CASE("lumped inner products") {
    const Grid g = build_grid(1, 0.5, 0.0);
    const std::vector<double> ones(3, 1.0), zeros(3, 0.0);
    CHECK(lumped_inner(g, ones, ones) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(lumped_inner(g, zeros, ones) == 0.0);
    CHECK(g.lumped_mass[0] == doctest::Approx(0.25));
    CHECK(g.lumped_mass[1] == doctest::Approx(0.5));

    const Grid g2 = build_grid(2, 0.05, 0.2);
    const std::vector<double> all(g2.num_nodes(), 1.0);
    CHECK(lumped_inner(g2, all, all) == doctest::Approx(1.0).epsilon(1e-12));
    const std::vector<double> in(g2.num_interior(), 1.0);
    CHECK(lumped_inner_interior(g2, in, in) == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("restrict and scatter are inverse on the interior") {
    const Grid g = build_grid(2, 0.25, 0.5);
    std::vector<double> all(g.num_nodes(), -1.0);
    std::vector<double> in(g.num_interior());
    for (std::size_t i = 0; i < in.size(); ++i) in[i] = static_cast<double>(i);
    g.scatter_interior(in, all);
    CHECK(g.restrict_interior(all) == in);
    for (int id : g.exterior_ids) CHECK(all[id] == -1.0);
  }
}
