#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "fixtures.hpp"
#include "rdnet/config.hpp"
#include "rdnet/error.hpp"
#include "rdnet/pipeline.hpp"

using namespace rdnet;
namespace fs = std::filesystem;

namespace {

const char* kSmall = R"(; small run
[network]
file = s1.crn

[grid]
dim = 1
cells = 16

[initial]
A = cosine 2 1
B = 1.5
default = random 0.5 1

[step]
dt = 0.01
mode = imex
positivity = reject_retry

[run]
horizon = 0.5
cadence = 0.1
seed = 11

[diagnostics]
powers = 1 2 4
equilibrium = none
entropy = ones
)";

std::string with(const std::string& base, const std::string& from, const std::string& to) {
  std::string s = base;
  const auto pos = s.find(from);
  REQUIRE(pos != std::string::npos);
  s.replace(pos, from.size(), to);
  return s;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rdnet-test-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("keys are read into the run config") {
    const RunConfig cfg = parse_run_config(kSmall, RDNET_CONFIG_DIR);
    CHECK(cfg.network_file == fs::path(RDNET_CONFIG_DIR) / "s1.crn");
    CHECK(cfg.grid.dim == 1);
    CHECK(cfg.grid.cells[0] == 16);
    CHECK(cfg.grid.lengths[0] == 1.0);
    CHECK(cfg.step.dt == 0.01);
    CHECK(cfg.step.mode == StepMode::Imex);
    CHECK(cfg.step.positivity == PositivityMode::RejectRetry);
    CHECK(cfg.horizon == 0.5);
    CHECK(cfg.seed == 11);
    CHECK(cfg.powers == std::vector<double>{1, 2, 4});
    CHECK_FALSE(cfg.equilibrium);
    CHECK_FALSE(cfg.entropy_auto);
    REQUIRE(cfg.initial.size() == 2);
    CHECK(cfg.initial.at("A").kind == Profile::Kind::Cosine);
    CHECK(cfg.initial.at("B").kind == Profile::Kind::Constant);
    CHECK(cfg.initial.at("B").a == 1.5);
    REQUIRE(cfg.default_profile);
    CHECK(cfg.default_profile->kind == Profile::Kind::Random);
  }

  TEST_CASE("2D grids repeat a single length and cell count") {
    const RunConfig cfg = parse_run_config(with(kSmall, "dim = 1", "dim = 2"), ".");
    CHECK(cfg.grid.dim == 2);
    CHECK(cfg.grid.cells[1] == 16);
    CHECK(cfg.grid.lengths[1] == 1.0);
  }

  TEST_CASE("bad configs are rejected") {
    CHECK_THROWS_AS(parse_run_config(with(kSmall, "[run]", "[runs]"), "."), ConfigError);
    CHECK_THROWS_AS(parse_run_config(with(kSmall, "seed = 11", "sead = 11"), "."), ConfigError);
    CHECK_THROWS_AS(parse_run_config(with(kSmall, "file = s1.crn", ""), "."), ConfigError);
    CHECK_THROWS_AS(parse_run_config(with(kSmall, "dim = 1", "dim = 3"), "."), ConfigError);
    CHECK_THROWS_AS(parse_run_config(with(kSmall, "cells = 16", "cells = 2"), "."), ConfigError);
    CHECK_THROWS_AS(parse_run_config(with(kSmall, "dt = 0.01", "dt = -1"), "."), ConfigError);
    CHECK_THROWS_AS(parse_run_config(with(kSmall, "mode = imex", "mode = rk4"), "."), ConfigError);
    CHECK_THROWS_AS(parse_run_config(with(kSmall, "cadence = 0.1", "cadence = 0"), "."), ConfigError);
    CHECK_THROWS_AS(parse_run_config(with(kSmall, "horizon = 0.5", "horizon = x"), "."), ConfigError);
    CHECK_THROWS_AS(parse_run_config(with(kSmall, "B = 1.5", "B = sine 1 2"), "."), ConfigError);
    CHECK_THROWS_AS(parse_run_config(with(kSmall, "powers = 1 2 4", "powers = 0.5"), "."), ConfigError);
    CHECK_THROWS_AS(parse_run_config(with(kSmall, "equilibrium = none", "equilibrium = maybe"), "."), ConfigError);
    CHECK_THROWS_AS(load_run_config("/nonexistent/run.cfg"), ConfigError);
  }

  TEST_CASE("profiles follow species order and fall back to the default") {
    const RunConfig cfg = parse_run_config(kSmall, ".");
    const auto profiles = profiles_for(cfg, fixtures::s1(2));
    REQUIRE(profiles.size() == 3);
    CHECK(profiles[0].kind == Profile::Kind::Cosine);
    CHECK(profiles[1].kind == Profile::Kind::Constant);
    CHECK(profiles[2].kind == Profile::Kind::Random);

    const RunConfig nodefault = parse_run_config(with(kSmall, "default = random 0.5 1", ""), ".");
    CHECK_THROWS_AS(profiles_for(nodefault, fixtures::s1(2)), ConfigError);
    const RunConfig stray = parse_run_config(with(kSmall, "B = 1.5", "Z = 1.5"), ".");
    CHECK_THROWS_AS(profiles_for(stray, fixtures::s1(2)), ConfigError);
  }

  TEST_CASE("fnv1a reference values") {
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
    CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
  }

  TEST_CASE("config hash covers both texts") {
    RunConfig cfg = load_run_config(fixtures::config_path("s1.cfg"));
    const std::string h = config_hash(cfg);
    CHECK(h.size() == 16);
    cfg.network_text += " ";
    CHECK(config_hash(cfg) != h);
  }

  TEST_CASE("bundled configs load") {
    for (const char* name : {"s1.cfg", "s2.cfg", "s3.cfg", "cycle.cfg", "reversible.cfg"}) {
      CAPTURE(name);
      const RunConfig cfg = load_run_config(fixtures::config_path(name));
      const NetworkFile file = parse_network_file(cfg.network_text);
      CHECK(profiles_for(cfg, file.network).size() == file.network.species.size());
    }
  }

  TEST_CASE("horizon 0 gives an empty-trace error") {
    RunConfig cfg = parse_run_config(with(kSmall, "horizon = 0.5", "horizon = 0"), RDNET_CONFIG_DIR);
    CHECK(cfg.horizon == 0.0);
    CHECK_THROWS_AS(run_simulation(cfg, fixtures::s1(2)), PreconditionError);
  }

  TEST_CASE("reruns write byte-identical traces") {
    RunConfig cfg = load_run_config(fixtures::config_path("s2.cfg"));
    cfg.horizon = 0.5;
    cfg.grid = Grid::line(1.0, 24);
    const NetworkFile file = parse_network_file(cfg.network_text);
    const fs::path a = scratch("rerun-a"), b = scratch("rerun-b");
    write_simulation_outputs(a, run_simulation(cfg, file.network), cfg);
    write_simulation_outputs(b, run_simulation(cfg, file.network), cfg);
    const std::string ta = fixtures::read((a / "trace.csv").string());
    CHECK(ta.size() > 100);
    CHECK(ta == fixtures::read((b / "trace.csv").string()));
    CHECK(ta.find("# seed " + std::to_string(cfg.seed)) != std::string::npos);

    cfg.seed += 1;
    const fs::path c = scratch("rerun-c");
    write_simulation_outputs(c, run_simulation(cfg, file.network), cfg);
    CHECK(fixtures::read((c / "trace.csv").string()) != ta);
  }

  TEST_CASE("snapshots are written on the configured cadence") {
    RunConfig cfg = parse_run_config(kSmall, RDNET_CONFIG_DIR);
    cfg.snapshot_every = 2;
    const fs::path dir = scratch("snap");
    run_simulation(cfg, fixtures::s1(2), dir);
    int count = 0;
    for (const auto& e : fs::directory_iterator(dir)) count += e.is_regular_file();
    // samples at t = 0, 0.1, ..., 0.5; every second one is kept, one file per species
    CHECK(count == 9);
    CHECK(fs::exists(dir / "C_4.field"));
    CHECK_FALSE(fs::exists(dir / "C_5.field"));
  }
}
