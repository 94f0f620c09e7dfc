#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "nlpf/error.hpp"
#include "nlpf/field_io.hpp"
#include "nlpf/repro.hpp"
#include "nlpf/simd.hpp"
#include "nlpf/stepper.hpp"
#include "nlpf/verify.hpp"

using namespace nlpf;

namespace {

RunConfig small_config(Variant v) {
  RunConfig c = example1_config(v);
  c.h = 1.0 / 100;
  c.T = 20 * c.tau;
  c.snapshots = {0.0, c.T};
  if (v == Variant::NonlocalCH) {
    c.delta = 0.1540;
  }
  return c;
}

}  // namespace

TEST_SUITE("stepper") {
  TEST_CASE("temperature step keeps an equilibrium and conserves enthalpy") {
    const Grid g = build_grid(1, 1.0 / 40, 0.0);
    const auto K = assemble_stiffness(g);
    ModelParams p;
    p.L = 0.5;
    const std::size_t n = g.num_interior();
    const std::vector<double> theta(n, 0.3), u(n, 0.2);
    const auto same = step_temperature(g, K, p, 1e-3, theta, u, u);
    for (double t : same) CHECK(std::abs(t - 0.3) <= 1e-13);

    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<double> th(n), u0(n), u1(n);
    for (std::size_t i = 0; i < n; ++i) th[i] = U(rng), u0[i] = U(rng), u1[i] = U(rng);
    const auto next = step_temperature(g, K, p, 1e-3, th, u1, u0);
    const auto mass = g.interior_mass();
    double before = 0.0, after = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      before += mass[i] * (th[i] - p.L * u0[i]);
      after += mass[i] * (next[i] - p.L * u1[i]);
      scale += mass[i] * (std::abs(th[i]) + p.L * std::abs(u0[i]));
    }
    CHECK(std::abs(after - before) <= 1e-12 * scale);
  }

  TEST_CASE("heat equation eigen-decay") {
    const auto c = verify::heat_eigen_decay(10);
    CHECK(c.pass);
    CHECK(c.value <= 1e-6);
  }

  TEST_CASE("zero coupling control keeps the liquid and the temperature") {
    for (Variant v : {Variant::NonlocalCH, Variant::NonlocalAC, Variant::LocalObstacle,
                      Variant::LocalRegular}) {
      RunConfig c = small_config(v);
      c.model.L = 0.0;
      c.init.kind = InitialCondition::Kind::Step;
      c.init.a = -1.0;  // u0 = 0
      c.init.theta0 = c.model.theta_e;
      const auto t = run(c);
      INFO(to_string(v));
      CHECK(t.summary.all_ok());
      const auto& last = t.snapshots.back().state;
      for (double u : last.u) CHECK(std::abs(u) <= 1e-14);
      for (double th : last.theta) CHECK(std::abs(th - c.model.theta_e) <= 1e-13);
    }
  }

  TEST_CASE("snapshot levels of the first reference set") {
    const Simulation sim(example1_config(Variant::NonlocalCH));
    CHECK(sim.snapshot_levels() == std::vector<int>{0, 4, 54});
  }

  TEST_CASE("every variant keeps its invariants on a short run") {
    for (Variant v : {Variant::NonlocalCH, Variant::NonlocalAC, Variant::LocalObstacle,
                      Variant::LocalRegular}) {
      const auto t = run(small_config(v));
      INFO(to_string(v));
      CHECK(t.summary.all_ok());
      CHECK(t.num_steps == 20);
      CHECK(t.snapshots.size() == 2);
    }
  }

  TEST_CASE("configuration validation") {
    auto c = small_config(Variant::NonlocalCH);
    c.delta = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = small_config(Variant::NonlocalCH);
    c.model.beta = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = small_config(Variant::NonlocalAC);
    c.model.beta = 0.1;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = small_config(Variant::LocalObstacle);
    c.tau = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = small_config(Variant::LocalObstacle);
    c.snapshots = {2.0 * c.T};
    CHECK_THROWS_AS(c.validate(), ConfigError);
  }

  TEST_CASE("step-size admissibility") {
    const auto ok = timestep_admissibility(example1_config(Variant::NonlocalAC));
    CHECK(ok.status == AdmissibilityReport::Status::Pass);
    CHECK(ok.bound == doctest::Approx(0.0012 / (0.16866 - 0.002)).epsilon(1e-3));
    const auto warn = timestep_admissibility(example1_config(Variant::NonlocalAC), 5.0);
    CHECK(warn.status == AdmissibilityReport::Status::Warn);
    const auto none = timestep_admissibility(example1_config(Variant::NonlocalCH));
    CHECK(none.status == AdmissibilityReport::Status::NotComputable);
  }

  TEST_CASE("results do not depend on the thread count or the run") {
    auto c = small_config(Variant::NonlocalCH);
    c.dim = 2;
    c.h = 1.0 / 40;
    c.delta = 0.1;
    c.model.beta = 0.02;
    c.init.kind = InitialCondition::Kind::Box;
    c.init.a = 0.3;
    c.init.b = 0.7;
    c.T = 5 * c.tau;
    c.snapshots = {c.T};
    auto dump = [&](int threads) {
      simd::set_num_threads(threads);
      const Simulation sim(c);
      const auto t = sim.run();
      std::ostringstream os;
      write_field(os, sim.grid(), t.snapshots.back().state.u, FieldLayout::AllNodes);
      write_field(os, sim.grid(), t.snapshots.back().state.theta, FieldLayout::Interior);
      return os.str();
    };
    const auto a = dump(1);
    const auto b = dump(1);
    const auto d = dump(4);
    simd::set_num_threads(1);
    CHECK(a == b);
    CHECK(a == d);
  }
}
