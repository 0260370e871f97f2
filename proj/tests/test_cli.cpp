#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "kamforge/cli/commands.hpp"
#include "kamforge/cli/config.hpp"
#include "kamforge/cli/grid_io.hpp"
#include "kamforge/errors.hpp"

using namespace kamforge;
using namespace kamforge::cli;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream o, e;
  const int code = run_cli(args, o, e);
  return {code, o.str(), e.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("kamforge_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(is), {});
}

}  // namespace

TEST_CASE("grid files round trip") {
  const auto dir = scratch("grid");
  const auto f = PeriodicField::from_function(2, 8, [](const double* x) { return std::sin(2 * M_PI * x[0]) + x[1]; });
  write_field((dir / "f.kamg").string(), f);
  const auto g = read_field((dir / "f.kamg").string());
  CHECK(g.dims() == 2);
  CHECK(g.samples() == f.samples());
  CHECK(slurp(dir / "f.kamg").substr(0, 4) == "KAMG");
  std::ofstream(dir / "bad.kamg") << "NOPE";
  CHECK_THROWS_AS(read_grid((dir / "bad.kamg").string()), ConfigError);
}

TEST_CASE("configuration round trip and field paths in errors") {
  RunConfig c;
  c.system.epsilon = 2e-4;
  c.kam.nu_max = 3;
  const RunConfig back = run_config_from_json(run_config_to_json(c));
  CHECK(back.system.epsilon == 2e-4);
  CHECK(back.kam.nu_max == 3);
  CHECK(run_config_to_json(back) == run_config_to_json(c));
  json bad = run_config_to_json(c);
  bad["kam"]["grid"] = "big";
  try {
    run_config_from_json(bad);
    FAIL("expected a schema error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("$.kam.grid") != std::string::npos);
  }
  CHECK_THROWS_AS(modulus_from_json(json{{"family", "holder"}, {"alpha", 3.0}}), ConfigError);
  const auto m = modulus_from_json(modulus_to_json(ModulusSpec::gen_log_holder(2, 1.5)));
  CHECK(m.family == ModulusFamily::gen_log_holder);
  CHECK(m.rho == 2);
}

TEST_CASE("modulus dini reports the closed-form value") {
  const Run r = run({"modulus", "dini", "--family", "logholder", "--lambda", "2", "--k", "6", "--tau", "2"});
  REQUIRE(r.code == kExitOk);
  const json j = json::parse(r.out);
  CHECK(j["schema_version"] == kSchemaVersion);
  CHECK(j["finite"] == true);
  CHECK(j["value"].get<double>() == doctest::Approx(1.4426950408889634).epsilon(1e-6));
}

TEST_CASE("dioph check on the golden pair and a resonance") {
  const Run g = run({"dioph", "check", "--omega", "golden2", "--tau", "0.25", "--K", "100"});
  REQUIRE(g.code == kExitOk);
  const json j = json::parse(g.out);
  CHECK(j["margin"].get<double>() == doctest::Approx(0.040407198342042667).epsilon(1e-12));
  CHECK(j["argmin"] == json::array({55, -34}));
  const Run r = run({"dioph", "check", "--omega", "1,0.5", "--K", "5"});
  CHECK(r.code == kExitHypothesis);
  CHECK(json::parse(r.out)["resonant"] == true);
}

TEST_CASE("unperturbed kam run and determinism") {
  const auto dir = scratch("kam");
  const Run gen = run({"examples", "gen", "--which", "hh", "--epsilon", "0", "--out", dir.string(), "--grid", "16"});
  REQUIRE(gen.code == kExitOk);
  REQUIRE(fs::exists(dir / "hh.json"));
  const std::string cfg = (dir / "hh.json").string();
  const Run a = run({"kam", "run", "--config", cfg, "--out", (dir / "a").string()});
  REQUIRE(a.code == kExitOk);
  const json s = json::parse(slurp(dir / "a" / "summary.json"));
  CHECK(s["schema_version"] == kSchemaVersion);
  CHECK(s["trace"]["records"] == 1);
  CHECK(s["residuals"]["invariance_u"].get<double>() == 0.0);
  std::istringstream csv(slurp(dir / "a" / "trace.csv"));
  std::string line;
  int lines = 0;
  while (std::getline(csv, line)) ++lines;
  CHECK(lines == 2);
  CHECK(fs::exists(dir / "a" / "u_minus_id_1.kamg"));
  CHECK(fs::exists(dir / "a" / "v_2.kamg"));
  const Run b = run({"kam", "run", "--config", cfg, "--out", (dir / "b").string()});
  REQUIRE(b.code == kExitOk);
  CHECK(slurp(dir / "a" / "trace.csv") == slurp(dir / "b" / "trace.csv"));
  CHECK(slurp(dir / "a" / "v_1.kamg") == slurp(dir / "b" / "v_1.kamg"));
}

TEST_CASE("hypothesis gate blocks a resonant run unless forced") {
  const auto dir = scratch("gate");
  RunConfig c;
  c.system.epsilon = 0.0;
  c.system.omega = {1.0L, 1.0L};
  c.kam.N = 16;
  std::ofstream(dir / "cfg.json") << run_config_to_json(c).dump(2);
  const std::string cfg = (dir / "cfg.json").string();
  const Run blocked = run({"kam", "run", "--config", cfg, "--out", (dir / "x").string()});
  CHECK(blocked.code == kExitHypothesis);
  const json s = json::parse(slurp(dir / "x" / "summary.json"));
  CHECK(s["hypotheses"]["H3"]["pass"] == false);
  CHECK_FALSE(fs::exists(dir / "x" / "trace.csv"));
  const Run forced = run({"kam", "run", "--config", cfg, "--out", (dir / "y").string(), "--force"});
  CHECK(forced.code == kExitOk);
}

TEST_CASE("regularity commands") {
  const auto dir = scratch("reg");
  GridFile g;
  g.resolution = {4096};
  for (int i = 0; i < 4096; ++i) g.samples.push_back(std::sqrt(i / 4096.0));
  write_grid((dir / "sqrt.kamg").string(), g);
  const Run e = run({"regularity", "estimate", "--input", (dir / "sqrt.kamg").string()});
  REQUIRE(e.code == kExitOk);
  CHECK(json::parse(e.out)["holder_exponent"].get<double>() == doctest::Approx(0.5).epsilon(0.1));

  const Run r = run({"regularity", "remaining", "--family", "logholder", "--lambda", "2", "--epsilon", "0.1",
                     "--count", "4", "--out", dir.string()});
  REQUIRE(r.code == kExitOk);
  const std::string csv = slurp(dir / "remaining.csv");
  CHECK(csv.rfind("gamma,L,outer,inner,value\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
}

TEST_CASE("smoothing commands") {
  const auto dir = scratch("smooth");
  const auto f = PeriodicField::from_function(1, 64, [](const double* x) { return std::cos(2 * M_PI * x[0]); });
  write_field((dir / "in.kamg").string(), f);
  const Run r = run({"smooth", "run", "--input", (dir / "in.kamg").string(), "--r", "0.01", "--out", dir.string()});
  REQUIRE(r.code == kExitOk);
  CHECK((read_field((dir / "smoothed.kamg").string()) - f).sup_norm() < 1e-14);
}

TEST_CASE("parse errors and help") {
  CHECK(run({}).code == kExitError);
  CHECK(run({"modulus", "dini", "--bogus"}).code == kExitError);
  const Run h = run({"kam", "run", "--help"});
  CHECK(h.code == kExitOk);
  CHECK(h.out.find("increment_v") != std::string::npos);
  const Run m = run({"modulus", "check", "--spec", "{\"family\": \"holder\"}"});
  CHECK(m.code == kExitError);
  CHECK(m.err.find("alpha") != std::string::npos);
}
