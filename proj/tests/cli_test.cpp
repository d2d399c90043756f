#include "lvgraph/config.hpp"
#include "lvgraph/error.hpp"
#include "lvgraph/runner.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace lvg;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "lvgraph_tests" / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ErrorCode code_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("config was accepted: " << text);
  return ErrorCode::ConfigInvalid;
}

const char* kTriangle = R"({
  "graph": {"vertices": ["x1", "x2", "x3"],
            "edges": [["x1", "x2", 1], ["x2", "x3", 1], ["x1", "x3", 1]]},
  "bc": "none",
  "params": {"a1": 1, "b1": 2, "c1": 1, "a2": 0.5, "b2": 1, "c2": 2, "d1": 1, "d2": 1},
  "initial": {"u": [7, 6, 5], "v": [4, 3, 2]},
  "t_end": 300)";

std::string triangle(const std::string& extra) { return std::string(kTriangle) + extra + "}"; }

}  // namespace

TEST_CASE("config rejects malformed input") {
  CHECK(code_of("{") == ErrorCode::ConfigInvalid);
  CHECK(code_of(R"({"graph": {"vertices": ["x"], "edges": []}, "bc": "none"})") ==
        ErrorCode::ConfigInvalid);
  CHECK(code_of(triangle(R"(, "sweep": {"axes": {"q": [0, 1, 2]}})")) ==
        ErrorCode::ConfigInvalid);
}

TEST_CASE("config errors keep the underlying error name") {
  const std::string bad_vertex = R"({
    "graph": {"vertices": ["x1", "x2"], "edges": [["x1", "x9", 1]]},
    "bc": "none",
    "params": {"a1": 1, "b1": 1, "c1": 1, "a2": 1, "b2": 1, "c2": 1, "d1": 1, "d2": 1},
    "initial": {"u": 1, "v": 1}})";
  try {
    parse_config(bad_vertex);
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigInvalid);
    CHECK(std::string(e.what()).find("UnknownVertex") != std::string::npos);
  }
  const std::string dirichlet_nonzero = R"({
    "graph": {"vertices": ["x", "z"], "edges": [["x", "z", 1]], "interior": ["x"]},
    "bc": "dirichlet",
    "params": {"a1": 1, "b1": 1, "c1": 1, "a2": 1, "b2": 1, "c2": 1, "d1": 1, "d2": 1},
    "initial": {"u": [1, 0.5], "v": [1, 0]}})";
  CHECK(code_of(dirichlet_nonzero) == ErrorCode::ConfigInvalid);
}

TEST_CASE("t_end must be positive") {
  std::string text = triangle("");
  text.replace(text.find("\"t_end\": 300"), 12, "\"t_end\": 0");
  CHECK(code_of(text) == ErrorCode::ConfigInvalid);
}

TEST_CASE("missing config file") {
  try {
    load_config("/nonexistent/lvgraph.json");
    FAIL("loaded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IoFailure);
  }
}

TEST_CASE("format_double round trips") {
  for (double x : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-310, 0.0}) {
    CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
  }
}

TEST_CASE("atomic writes leave no temporary behind") {
  const fs::path dir = scratch("atomic");
  fs::create_directories(dir);
  write_file_atomic(dir / "a.txt", "first");
  write_file_atomic(dir / "a.txt", "second");
  CHECK(slurp(dir / "a.txt") == "second");
  CHECK(std::distance(fs::directory_iterator(dir), fs::directory_iterator{}) == 1);
}

TEST_CASE("simulate the Neumann config") {
  RunConfig cfg = load_config(fs::path(LVG_SOURCE_DIR) / "configs" / "neumann_v_wins.json");
  cfg.out = scratch("simulate").string();
  const RunReport r = run_simulate(cfg);
  CHECK(r.invariants_ok);
  REQUIRE(r.regime);
  CHECK(r.regime->kind == RegimeKind::VWins);
  REQUIRE(r.trailing_distance);
  CHECK(*r.trailing_distance < 1e-3);
  const fs::path csv = fs::path(cfg.out) / "trajectory.csv";
  REQUIRE(fs::exists(csv));
  CHECK(fs::exists(fs::path(cfg.out) / "summary.json"));
  const std::string first = slurp(csv);
  CHECK(first.rfind("t,u@x1,u@x2,u@x3,u@x4,u@x5,v@x1", 0) == 0);
  run_simulate(cfg);
  CHECK(slurp(csv) == first);
}

TEST_CASE("reproduce") {
  const ReproduceReport r = run_reproduce("neumann-i", std::nullopt);
  CHECK(r.passed);
  CHECK(r.distance < 1e-3);
  REQUIRE(r.settled_at);
  CHECK(*r.settled_at <= 1000.0);
  try {
    run_reproduce("nope", std::nullopt);
    FAIL("ran");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownExample);
  }
}

TEST_CASE("eigen and steady on the Dirichlet config") {
  RunConfig cfg = load_config(fs::path(LVG_SOURCE_DIR) / "configs" / "dirichlet_coexist.json");
  cfg.out = scratch("steady").string();
  const std::string eig = run_eigen(cfg);
  CHECK(eig.rfind("lambda0_1,", 0) == 0);
  CHECK(eig.find("vertex,phi1,phi2\n") != std::string::npos);
  run_steady(cfg);
  CHECK(fs::exists(fs::path(cfg.out) / "steady.csv"));
  CHECK(fs::exists(fs::path(cfg.out) / "bounds.csv"));

  RunConfig neumann = load_config(fs::path(LVG_SOURCE_DIR) / "configs" / "neumann_v_wins.json");
  try {
    run_steady(neumann);
    FAIL("ran");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigInvalid);
  }
}

TEST_CASE("single-point sweep matches classify and simulate") {
  RunConfig cfg = parse_config(triangle(R"(, "sweep": {"axes": {"a1": [1.7, 1.7, 1]}})"));
  cfg.out = scratch("sweep1").string();
  const SweepReport s = run_sweep(cfg, 1);
  REQUIRE(s.rows.size() == 1);
  const SweepRow& row = s.rows[0];
  CHECK(row.params.a1 == 1.7);

  RunConfig single = cfg;
  single.params.a1 = 1.7;
  single.sweep.reset();
  // Sweep points sample only the endpoint; the step sequence follows the samples.
  single.samples = SampleSchedule{0.0, 0.0, cfg.t_end, {}};
  const RunReport r = run_simulate(single, false);
  REQUIRE(r.regime);
  CHECK(row.kind == r.regime->kind);
  CHECK(row.u_min == r.final_state.u.minCoeff());
  CHECK(row.v_max == r.final_state.v.maxCoeff());
  CHECK(row.agreement == "yes");
}

TEST_CASE("sweep over a ratio edge") {
  // a2 = 0.5 puts a1 = 1 exactly on b1/b2 = 2.
  RunConfig cfg = parse_config(triangle(R"(, "sweep": {"axes": {"a1": [0.5, 2.5, 5]}})"));
  cfg.out = scratch("sweep5").string();
  const SweepReport s = run_sweep(cfg, 2);
  REQUIRE(s.rows.size() == 5);
  CHECK(s.failures == 0);
  CHECK(s.disagreements == 0);
  CHECK(s.rows[0].kind == RegimeKind::Coexist);
  CHECK(s.rows[1].kind == RegimeKind::Unresolved);
  CHECK(s.rows[1].agreement == "na");
  for (std::size_t i = 2; i < 5; ++i) CHECK(s.rows[i].kind == RegimeKind::UWins);
  for (std::size_t i = 0; i < 5; ++i) CHECK(s.rows[i].index == i);

  const std::string csv = slurp(s.csv_path);
  CHECK(csv.rfind("point,a1,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);

  // Thread count does not change the merged file.
  cfg.out = scratch("sweep5-serial").string();
  CHECK(slurp(run_sweep(cfg, 1).csv_path) == csv);
}

TEST_CASE("oversized grid is refused") {
  RunConfig cfg =
      parse_config(triangle(R"(, "sweep": {"axes": {"a1": [1, 2, 11]}, "max_points": 10})"));
  cfg.out = scratch("sweep-big").string();
  try {
    run_sweep(cfg, 1);
    FAIL("ran");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GridTooLarge);
  }
}
