#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "nlpf/config.hpp"
#include "nlpf/error.hpp"
#include "nlpf/field_io.hpp"
#include "nlpf/repro.hpp"

using namespace nlpf;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "nlpf_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string base_config() {
  return R"(# reference 1D setup
[model]
mu = 0.0012
L = 0.5
D = 1
beta = 0.02
alpha = 0.9
rho = 20
theta_e = 1
[kernel]
epsilon = 0.02
delta = 0.154
[grid]
dim = 1
h = 0.0024
[time]
tau = 0.0003
T = 0.0163
snapshots = [0, 0.0013, 0.0163]
[variant]
name = nonlocal_CH
[init]
preset = step(0.25)
)";
}

std::string without_line(const std::string& text, const std::string& line) {
  std::string out = text;
  out.erase(out.find(line), line.size() + 1);
  return out;
}

}  // namespace

TEST_SUITE("field_io") {
  TEST_CASE("CSV round trip is exact") {
    for (int dim : {1, 2}) {
      const Grid g = build_grid(dim, 1.0 / 9, 0.25);
      std::mt19937_64 rng(1);
      std::uniform_real_distribution<double> U(-1.0, 1.0);
      for (auto layout : {FieldLayout::Interior, FieldLayout::AllNodes}) {
        std::vector<double> f(layout == FieldLayout::Interior ? g.num_interior() : g.num_nodes());
        for (auto& v : f) v = U(rng) * std::exp(10 * U(rng));
        std::stringstream ss;
        write_field(ss, g, f, layout);
        CHECK(read_field(ss, g, layout) == f);
      }
    }
  }

  TEST_CASE("2D 3x3 field has nine rows and a header") {
    const Grid g = build_grid(2, 0.5, 0.0);
    const std::vector<double> f(9, 0.25);
    std::stringstream ss;
    write_field(ss, g, f, FieldLayout::Interior);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(ss, line)) lines.push_back(line);
    REQUIRE(lines.size() == 10);
    CHECK(lines[0] == "x,y,value");
  }

  TEST_CASE("reading against the wrong grid throws") {
    const Grid g = build_grid(1, 0.1, 0.0);
    std::stringstream ss;
    write_field(ss, g, std::vector<double>(g.num_interior(), 0.0), FieldLayout::Interior);
    CHECK_THROWS_AS(read_field(ss, build_grid(1, 0.05, 0.0), FieldLayout::Interior), Error);
  }

  TEST_CASE("raw read reconstructs the grid") {
    const Grid g = build_grid(2, 0.125, 0.0);
    std::vector<double> f(g.num_interior());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = 0.01 * static_cast<double>(i);
    const auto path = scratch("raw.csv").string();
    write_field(path, g, f, FieldLayout::Interior);
    const auto raw = read_raw_field(path);
    CHECK(raw.dim == 2);
    CHECK(raw.values == f);
    const Grid back = grid_from_raw(raw);
    CHECK(back.cells == 8);
  }

  TEST_CASE("VTK structured points header") {
    const Grid g = build_grid(2, 0.25, 0.0);
    const auto path = scratch("f.vtk").string();
    write_vtk(path, g, {{"u", std::vector<double>(25, 1.0)}, {"theta", std::vector<double>(25, 0.0)}},
              FieldLayout::Interior);
    std::ifstream is(path);
    std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    CHECK(text.rfind("# vtk DataFile Version", 0) == 0);
    CHECK(text.find("DATASET STRUCTURED_POINTS") != std::string::npos);
    CHECK(text.find("DIMENSIONS 5 5 1") != std::string::npos);
    CHECK(text.find("POINT_DATA 25") != std::string::npos);
    CHECK(text.find("SCALARS u double") != std::string::npos);
    CHECK(text.find("SCALARS theta double") != std::string::npos);
  }
}

TEST_SUITE("config") {
  TEST_CASE("a complete file builds the reference run") {
    std::istringstream is(base_config());
    const auto c = build_run_config(ConfigTable::parse(is));
    CHECK(c.variant == Variant::NonlocalCH);
    CHECK(c.delta == doctest::Approx(0.154));
    CHECK(c.snapshots == std::vector<double>{0.0, 0.0013, 0.0163});
    CHECK(c.init.kind == InitialCondition::Kind::Step);
    CHECK(c.init.a == doctest::Approx(0.25));
    CHECK(Simulation(c).snapshot_levels() == std::vector<int>{0, 4, 54});
  }

  TEST_CASE("missing kernel delta names the key") {
    std::istringstream is(without_line(base_config(), "delta = 0.154"));
    const auto t = ConfigTable::parse(is);
    try {
      build_run_config(t);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(e.key() == "kernel.delta");
      CHECK(std::string(e.what()).find("kernel.delta") != std::string::npos);
    }
  }

  TEST_CASE("unknown and duplicate keys report the line") {
    std::istringstream bad(base_config() + "[grid]\nspacing = 3\n");
    try {
      build_run_config(ConfigTable::parse(bad));
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(e.key() == "grid.spacing");
      CHECK(e.line() == 25);
    }
    std::istringstream dup(base_config() + "[time]\ntau = 0.001\n");
    CHECK_THROWS_AS(ConfigTable::parse(dup), ConfigError);
    std::istringstream num(without_line(base_config(), "h = 0.0024") + "[grid]\nh = fine\n");
    CHECK_THROWS_AS(build_run_config(ConfigTable::parse(num)), ConfigError);
  }

  TEST_CASE("overrides replace values") {
    std::istringstream is(base_config());
    auto t = ConfigTable::parse(is);
    t.apply_override("time.tau=0.0001");
    t.apply_override("variant.name = nonlocal_AC");
    t.apply_override("model.beta=0");
    const auto c = build_run_config(t);
    CHECK(c.tau == 0.0001);
    CHECK(c.variant == Variant::NonlocalAC);
    CHECK_THROWS_AS(t.apply_override("time.tau"), ConfigError);
    CHECK_THROWS_AS(t.apply_override("bogus.key=1"), ConfigError);
  }

  TEST_CASE("written configs read back unchanged") {
    for (const auto& c0 : {example1_config(Variant::NonlocalCH), example2_config(0.077),
                           example3_config(Variant::NonlocalAC),
                           example3_config(Variant::LocalRegular)}) {
      std::stringstream ss;
      write_config(ss, c0);
      const auto c1 = build_run_config(ConfigTable::parse(ss));
      std::stringstream again;
      write_config(again, c1);
      CHECK(again.str() == ss.str());
      CHECK(c1.variant == c0.variant);
      CHECK(c1.pdas.convolution_mode == c0.pdas.convolution_mode);
      CHECK(c1.tau == c0.tau);
      CHECK(c1.snapshots == c0.snapshots);
    }
  }
}

TEST_SUITE("config") {
  TEST_CASE("shipped configs equal the built-in presets") {
    const struct {
      const char* file;
      RunConfig config;
    } cases[] = {
        {"ex1_nonlocal_ch.cfg", example1_config(Variant::NonlocalCH)},
        {"ex1_local_obstacle.cfg", example1_config(Variant::LocalObstacle)},
        {"ex2_local_obstacle.cfg", example2_config(0.0)},
        {"ex2_nonlocal_ch_delta0.154.cfg", example2_config(0.1540)},
        {"ex2_nonlocal_ch_delta0.077.cfg", example2_config(0.0770)},
        {"ex2_nonlocal_ch_delta0.0385.cfg", example2_config(0.0385)},
        {"ex3_nonlocal_ch.cfg", example3_config(Variant::NonlocalCH)},
        {"ex3_nonlocal_ac.cfg", example3_config(Variant::NonlocalAC)},
        {"ex3_local_obstacle.cfg", example3_config(Variant::LocalObstacle)},
        {"ex3_local_regular.cfg", example3_config(Variant::LocalRegular)},
    };
    for (const auto& c : cases) {
      INFO(c.file);
      const auto loaded = load_run_config(std::string(NLPF_SOURCE_DIR) + "/configs/" + c.file);
      std::stringstream a, b;
      write_config(a, loaded);
      write_config(b, c.config);
      CHECK(a.str() == b.str());
    }
  }
}

TEST_SUITE("cli") {
  TEST_CASE("run writes a report reflecting overrides") {
    const auto dir = scratch("cli_run");
    fs::remove_all(dir);
    const auto cfg = scratch("cli.cfg");
    {
      std::ofstream os(cfg);
      os << without_line(base_config(), "T = 0.0163") << "[time]\nT = 0.0015\n";
    }
    const std::string cmd = std::string(NLPF_CLI) + " run " + cfg.string() +
                            " --override time.snapshots=[0,0.0015] --override solver.pdas_c=2" +
                            " --output " + dir.string() + " > /dev/null";
    REQUIRE(std::system(cmd.c_str()) == 0);
    std::ifstream is(dir / "report.json");
    REQUIRE(is.good());
    const auto report = nlohmann::json::parse(is);
    CHECK(report["config"]["solver"]["pdas_c"].get<double>() == 2.0);
    CHECK(fs::exists(dir / "u_k5.csv"));
  }

  TEST_CASE("missing key exits with the configuration status") {
    const auto cfg = scratch("cli_bad.cfg");
    {
      std::ofstream os(cfg);
      os << without_line(base_config(), "delta = 0.154");
    }
    const std::string cmd = std::string(NLPF_CLI) + " run " + cfg.string() + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(status) == 2);
  }
}
