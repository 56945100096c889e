#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "lmcf/io.hpp"

using namespace lmcf;
namespace fs = std::filesystem;

namespace {

struct CoutCapture {
  std::ostringstream out;
  std::streambuf* saved;
  CoutCapture() : saved(std::cout.rdbuf(out.rdbuf())) {}
  ~CoutCapture() { std::cout.rdbuf(saved); }
  std::string text() const { return out.str(); }
};

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "lmcf_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "config.ini";
  std::ofstream out(p);
  out << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const std::string kLineConfig = R"(
[solution]
kind = line
samples = 16
x1 = 4
y1 = 0

[flow]
t_start = 0
t_end = 0.02
scheme = fixed
dt = 1e-3
snapshot_stride = 5
boundary = free_neumann
)";

}  // namespace

TEST_CASE("config parsing: sections, comments, defaults, typed getters") {
  const Config cfg = Config::parse_text(
      "# comment\n[solution]\nkind = line # trailing\nsamples = 42\n\n[flow]\ndt = 2.5e-4\n");
  CHECK(cfg.get_string("solution", "kind", "") == "line");
  CHECK(cfg.get_long("solution", "samples", 0) == 42);
  CHECK(cfg.get_double("flow", "dt", 0.0) == doctest::Approx(2.5e-4));
  CHECK(cfg.get_double("flow", "t_end", 7.0) == 7.0);  // default
  cfg.enforce_known_keys();
}

TEST_CASE("unknown keys are hard errors") {
  const Config cfg = Config::parse_text("[solution]\nkinds = line\n");
  CHECK_THROWS_AS(cfg.enforce_known_keys(), ConfigError);
  const Config cfg2 = Config::parse_text("[solutions]\nkind = line\n");
  CHECK_THROWS_AS(cfg2.enforce_known_keys(), ConfigError);
}

TEST_CASE("malformed config lines are rejected") {
  CHECK_THROWS_AS(Config::parse_text("kind = line\n"), ConfigError);    // key outside section
  CHECK_THROWS_AS(Config::parse_text("[solution\nkind = x\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse_text("[a]\nno_equals_here\n"), ConfigError);
  const Config bad = Config::parse_text("[flow]\ndt = abc\n");
  CHECK_THROWS_AS(bad.get_double("flow", "dt", 0.0), ConfigError);
}

TEST_CASE("doubles round-trip through the shortest decimal form") {
  for (double v : {0.0, 1.0, -0.1, 1e-300, 3.141592653589793, 0.375, 2.5e-4, -1.7976931348623157e308}) {
    CHECK(parse_double(format_double(v)) == v);
  }
}

TEST_CASE("simulate: line config gives time-independent coordinates") {
  const fs::path dir = temp_dir("sim_line");
  CliOptions opts;
  opts.config_path = write_config(dir, kLineConfig);
  opts.out_dir = dir / "out";
  int code;
  {
    CoutCapture cap;
    code = cmd_simulate(opts);
  }
  REQUIRE(code == 0);
  const LoadedTrajectory loaded = read_trajectory(opts.out_dir);
  REQUIRE(loaded.trajectory.size() >= 2);
  const auto& first = loaded.trajectory.states.front().curve;
  for (const auto& state : loaded.trajectory.states)
    for (std::size_t i = 0; i < first.size(); ++i) {
      CHECK(state.curve.vertices[i].x == first.vertices[i].x);
      CHECK(state.curve.vertices[i].y == first.vertices[i].y);
    }
}

TEST_CASE("snapshot CSV round-trips coordinates exactly") {
  const fs::path dir = temp_dir("roundtrip");
  CliOptions opts;
  opts.config_path = write_config(dir, R"(
[solution]
kind = sine_graph
samples = 64
periods = 1

[flow]
t_end = 0.01
scheme = semi_implicit
dt = 1e-3
snapshot_stride = 2
boundary = periodic
)");
  opts.out_dir = dir / "out";
  int code;
  {
    CoutCapture cap;
    code = cmd_simulate(opts);
  }
  REQUIRE(code == 0);
  const Trajectory original = read_trajectory(opts.out_dir).trajectory;
  write_snapshots_csv(dir / "again.csv", original);
  CHECK(slurp(dir / "again.csv") == slurp(opts.out_dir / "snapshots.csv"));
}

TEST_CASE("re-running the same config is bit-identical") {
  const fs::path dir = temp_dir("rerun");
  const fs::path cfg = write_config(dir, kLineConfig);
  for (const char* sub : {"a", "b"}) {
    CliOptions opts;
    opts.config_path = cfg;
    opts.out_dir = dir / sub;
    CoutCapture cap;
    REQUIRE(cmd_simulate(opts) == 0);
  }
  CHECK(slurp(dir / "a" / "snapshots.csv") == slurp(dir / "b" / "snapshots.csv"));
}

TEST_CASE("simulate: shrinking circle radius statistic hits the oracle") {
  const fs::path dir = temp_dir("sim_circle");
  CliOptions opts;
  opts.config_path = write_config(dir, R"(
[solution]
kind = circle
samples = 256

[flow]
t_end = 0.375
scheme = explicit_cfl
cfl_safety = 0.4
snapshot_stride = 100000
boundary = periodic
)");
  opts.out_dir = dir / "out";
  int code;
  {
    CoutCapture cap;
    code = cmd_simulate(opts);
  }
  REQUIRE(code == 0);
  const Trajectory traj = read_trajectory(opts.out_dir).trajectory;
  const auto& c = traj.states.back().curve;
  double mean = 0.0;
  for (std::size_t i = 0; i + 1 < c.size(); ++i) mean += std::hypot(c.vertices[i].x, c.vertices[i].y);
  mean /= (c.size() - 1);
  CHECK(mean == doctest::Approx(0.5).epsilon(4e-3));
}

TEST_CASE("simulate: grim reaper translates by (1, 0) per unit time") {
  const fs::path dir = temp_dir("sim_reaper");
  CliOptions opts;
  opts.config_path = write_config(dir, R"(
[solution]
kind = grim_reaper
samples = 131
y_min = -1.0
y_max = 1.0

[flow]
t_end = 0.2
scheme = semi_implicit
dt = 1e-3
snapshot_stride = 100
reparametrize_every = 25
boundary = pin_to_exact
)");
  opts.out_dir = dir / "out";
  opts.svg = true;
  int code;
  {
    CoutCapture cap;
    code = cmd_simulate(opts);
  }
  REQUIRE(code == 0);
  CHECK(fs::exists(opts.out_dir / "snapshots.svg"));
  CHECK(slurp(opts.out_dir / "snapshots.svg").find("<polyline") != std::string::npos);
  const Trajectory traj = read_trajectory(opts.out_dir).trajectory;
  PlanarCurve shifted = traj.states.front().curve;
  for (auto& v : shifted.vertices) v += Vec2{0.2, 0.0};
  CHECK(polyline_hausdorff(traj.states.back().curve, shifted) < 3e-3);
}

TEST_CASE("exit code 2 on config errors") {
  const fs::path dir = temp_dir("bad_config");
  CliOptions opts;
  opts.config_path = write_config(dir, "[solution]\nkind = dodecahedron\n");
  opts.out_dir = dir / "out";
  CoutCapture cap;
  CHECK(cmd_simulate(opts) == 2);
  opts.config_path = write_config(dir, "[solution]\nkind = line\nbogus_key = 1\n");
  CHECK(cmd_simulate(opts) == 2);
  opts.config_path = dir / "missing.ini";
  CHECK(cmd_simulate(opts) == 2);
}

TEST_CASE("exit code 3 on spacing collapse, with the reason in the manifest") {
  const fs::path dir = temp_dir("collapse");
  CliOptions opts;
  opts.config_path = write_config(dir, R"(
[solution]
kind = circle
samples = 32
radius = 0.2

[flow]
t_end = 1.0
scheme = explicit_cfl
snapshot_stride = 100000
boundary = periodic
)");
  opts.out_dir = dir / "out";
  int code;
  {
    CoutCapture cap;
    code = cmd_simulate(opts);
  }
  CHECK(code == 3);
  const std::string manifest = slurp(opts.out_dir / "manifest.json");
  CHECK(manifest.find("spacing collapsed") != std::string::npos);
}

TEST_CASE("verify: healthy residual run passes, strict tolerances fail with exit 1") {
  const fs::path dir = temp_dir("verify");
  CliOptions sim;
  sim.config_path = write_config(dir, R"(
[solution]
kind = grim_reaper
samples = 401

[flow]
t_end = 2e-5
scheme = fixed
dt = 5e-6
snapshot_stride = 1
boundary = pin_to_exact
)");
  sim.out_dir = dir / "out";
  {
    CoutCapture cap;
    REQUIRE(cmd_simulate(sim) == 0);
  }
  CliOptions verify;
  verify.traj_dir = sim.out_dir;
  verify.config_path = write_config(dir, "[verify]\ntol_cos_h = 1e-4\ntol_kato = 1e-4\n");
  {
    CoutCapture cap;
    CHECK(cmd_verify(verify) == 0);
    CHECK(cap.text().find("overall: PASS") != std::string::npos);
    CHECK(cap.text().find("r1_sup:") != std::string::npos);
  }
  // deliberately strict tolerance: named failing check, exit 1
  verify.config_path =
      write_config(dir, "[verify]\ntol_r1 = 1e-15\ntol_cos_h = 1e-4\ntol_kato = 1e-4\n");
  {
    CoutCapture cap;
    CHECK(cmd_verify(verify) == 1);
    CHECK(cap.text().find("check_r1: FAIL") != std::string::npos);
  }
}

TEST_CASE("estimate: line trajectory sweeps to zero with scaling ok") {
  const fs::path dir = temp_dir("estimate_line");
  CliOptions sim;
  sim.config_path = write_config(dir, R"(
[solution]
kind = line
samples = 101
x1 = 30

[flow]
t_end = 4.0
scheme = fixed
dt = 0.5
snapshot_stride = 1
boundary = free_neumann
)");
  sim.out_dir = dir / "out";
  {
    CoutCapture cap;
    REQUIRE(cmd_simulate(sim) == 0);
  }
  CliOptions est;
  est.traj_dir = sim.out_dir;
  est.out_dir = dir / "est";
  est.config_path = write_config(dir, R"(
[estimate]
r_list = 2,4
t_list = 1,2
delta = 1
center_time = 2
basepoint_index = 50
)");
  {
    CoutCapture cap;
    CHECK(cmd_estimate(est) == 0);
    CHECK(cap.text().find("scaling_ok: true") != std::string::npos);
  }
  const std::string csv = slurp(est.out_dir / "estimate.csv");
  CHECK(csv.find("R,T,sup_ratio,ratio_to_bound") == 0);
  CHECK(slurp(est.out_dir / "manifest.json").find("\"scaling_ok\": true") != std::string::npos);
}

TEST_CASE("estimate: b below the calibration level exits 1") {
  const fs::path dir = temp_dir("estimate_bad_b");
  CliOptions sim;
  sim.config_path = write_config(dir, R"(
[solution]
kind = sine_graph
samples = 256
periods = 4

[flow]
t_end = 1.0
scheme = semi_implicit
dt = 2e-3
snapshot_stride = 50
boundary = periodic
)");
  sim.out_dir = dir / "out";
  {
    CoutCapture cap;
    REQUIRE(cmd_simulate(sim) == 0);
  }
  CliOptions est;
  est.traj_dir = sim.out_dir;
  est.out_dir = dir / "est";
  est.config_path = write_config(dir, R"(
[estimate]
r_list = 2
t_list = 0.5
b = 0.01
center_time = 0.5
)");
  CoutCapture cap;
  CHECK(cmd_estimate(est) == 1);
}

TEST_CASE("soliton command: grim reaper passes, circle fails") {
  const fs::path dir = temp_dir("soliton");
  CliOptions opts;
  opts.config_path = write_config(dir, R"(
[solution]
kind = grim_reaper
samples = 400

[soliton]
vx = 1
vy = 0
tolerance = 1e-3
)");
  opts.out_dir = dir / "out";
  {
    CoutCapture cap;
    CHECK(cmd_soliton(opts) == 0);
  }
  opts.config_path = write_config(dir, R"(
[solution]
kind = circle
samples = 256

[soliton]
vx = 1
vy = 0
tolerance = 1e-3
)");
  CoutCapture cap;
  CHECK(cmd_soliton(opts) == 1);
}

TEST_CASE("inequalities command: clean run, reproducible outputs") {
  const fs::path dir = temp_dir("lab");
  CliOptions opts;
  opts.config_path = write_config(dir, "[inequalities]\nsamples = 20000\nseed = 99\n");
  opts.out_dir = dir / "a";
  {
    CoutCapture cap;
    CHECK(cmd_inequalities(opts) == 0);
  }
  opts.out_dir = dir / "b";
  {
    CoutCapture cap;
    CHECK(cmd_inequalities(opts) == 0);
  }
  CHECK(slurp(dir / "a" / "inequalities.txt") == slurp(dir / "b" / "inequalities.txt"));
}
