#include "moorfd/config.hpp"
#include "moorfd/csv.hpp"
#include "moorfd/errors.hpp"
#include "moorfd/hydro.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

using namespace moorfd;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("moorfd_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + MOORFD_CLI + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("shipped config equals the built-in defaults") {
  const auto a = config::load_config(fs::path(MOORFD_SOURCE_DIR) / "config" / "default.ini");
  const auto b = config::default_config();
  CHECK(a.wave.hs == b.wave.hs);
  CHECK(a.wave.tp == b.wave.tp);
  CHECK(a.wave.gamma == b.wave.gamma);
  CHECK(a.v_wind == b.v_wind);
  CHECK(a.duration == b.duration);
  CHECK(a.dt == b.dt);
  CHECK(a.dt_in == b.dt_in);
  CHECK(a.noise.surge == b.noise.surge);
  CHECK(a.mooring.length == b.mooring.length);
  CHECK(a.mooring.ea == b.mooring.ea);
  CHECK(a.mooring.angles_deg == b.mooring.angles_deg);
  CHECK(a.rotor.rated_speed == doctest::Approx(b.rotor.rated_speed).epsilon(1e-15));
  CHECK(a.kp == b.kp);
  CHECK(a.ident.rad_order == b.ident.rad_order);
  CHECK(a.ident.wave_order == b.ident.wave_order);
  CHECK(a.ident.t_d == b.ident.t_d);
  CHECK(a.detect.alpha == b.detect.alpha);
  CHECK(a.seeds.scenario_noise == b.seeds.scenario_noise);
  CHECK(a.output_dir == b.output_dir);
  REQUIRE(a.cases.size() == b.cases.size());
  for (const auto& [id, faults] : b.cases) {
    REQUIRE(a.cases.at(id).size() == faults.size());
    CHECK(a.cases.at(id)[0].kind == faults[0].kind);
    CHECK(a.cases.at(id)[0].line_index == faults[0].line_index);
    CHECK(a.cases.at(id)[0].time == faults[0].time);
    CHECK(a.cases.at(id)[0].theta_x == faults[0].theta_x);
  }
  CHECK(b.far_gate() == doctest::Approx(1.0 / 36.0));
}

TEST_CASE("config overrides, comments and case sections") {
  const auto c = config::parse_config(
      "; comment\n[wave]\nhs = 3.5   # metres\n[case.2]\nfault = fairlead_release,3,900,0\n"
      "fault = anchor_slip, 1, 1000, 800\n[case.7]\nfault = fairlead_release,2,100,0\n");
  CHECK(c.wave.hs == 3.5);
  REQUIRE(c.cases.at(2).size() == 2);
  CHECK(c.cases.at(2)[0].line_index == 3);
  CHECK(c.cases.at(2)[1].kind == mooring::FaultKind::AnchorSlip);
  CHECK(c.cases.at(1).size() == 1);
  CHECK(c.cases.count(7) == 1);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(config::parse_config("[wave]\nheight = 2\n"), ConfigError);
  CHECK_THROWS_AS(config::parse_config("[wave]\nhs = 2\nhs = 3\n"), ConfigError);
  CHECK_THROWS_AS(config::parse_config("[wave]\nhs = two\n"), ConfigError);
  CHECK_THROWS_AS(config::parse_config("[wave\nhs = 2\n"), ConfigError);
  CHECK_THROWS_AS(config::parse_config("[wave]\nhs 2\n"), ConfigError);
  CHECK_THROWS_AS(config::parse_config("[simulation]\ndt_in = 0.03\n"), ConfigError);
  CHECK_THROWS_AS(config::parse_config("[simulation]\nduration = 20\n"), ConfigError);
  CHECK_THROWS_AS(config::parse_config("[detect]\nhold = 1.5\n"), ConfigError);
  CHECK_THROWS_AS(config::parse_config("[seeds]\nscenario_wave = -1\n"), ConfigError);
  CHECK_THROWS_AS(config::parse_config("[case.1]\nfault = fairlead_release,4,100,0\n"),
                  ConfigError);
  CHECK_THROWS_AS(config::parse_config("[case.1]\nfault = anchor_slip,1,100,0\n"), ConfigError);
  CHECK_THROWS_AS(config::parse_config("[identify]\nfrd = /nonexistent/frd.csv\n"
                                       "ainf = /nonexistent/ainf.csv\n"),
                  ConfigError);
  CHECK_THROWS_AS(config::load_config("/nonexistent/moorfd.ini"), ConfigError);
}

TEST_CASE("fault specifications") {
  const auto f = config::parse_fault("anchor_slip, 2, 1500, 957");
  CHECK(f.kind == mooring::FaultKind::AnchorSlip);
  CHECK(f.line_index == 2);
  CHECK(f.time == 1500.0);
  CHECK(f.theta_x == 957.0);
  CHECK_THROWS_AS(config::parse_fault("snap,1,10,0"), ConfigError);
  CHECK_THROWS_AS(config::parse_fault("fairlead_release,1,10"), ConfigError);
  CHECK_THROWS_AS(config::parse_fault("fairlead_release,x,10,0"), ConfigError);
}

TEST_CASE("relative dataset paths resolve against the config file") {
  const auto dir = scratch("relpath");
  fs::create_directories(dir / "data");
  write_text(dir / "data" / "frd.csv", "");
  write_text(dir / "data" / "ainf.csv", "");
  write_text(dir / "cfg.ini", "[identify]\nfrd = data/frd.csv\nainf = data/ainf.csv\n");
  const auto c = config::load_config(dir / "cfg.ini");
  CHECK(c.ident.frd_csv == dir / "data" / "frd.csv");
  fs::remove_all(dir);
}

TEST_CASE("command line: exit codes") {
  const auto dir = scratch("exit");
  CHECK(run_cli("") == 2);
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("fly") == 2);
  CHECK(run_cli("run") == 2);
  CHECK(run_cli("wave-export --config /nonexistent.ini") == 2);
  write_text(dir / "bad.ini", "[wave]\nhs = -1\n");
  CHECK(run_cli("wave-export --config \"" + (dir / "bad.ini").string() + "\"") == 2);
  write_text(dir / "unknown.ini", "[wave]\ncolour = blue\n");
  CHECK(run_cli("wave-export --config \"" + (dir / "unknown.ini").string() + "\"") == 2);
  // Running a case needs a calibration in the output directory.
  CHECK(run_cli("run --case 1 --out \"" + (dir / "empty").string() + "\"") == 2);
  fs::remove_all(dir);
}

TEST_CASE("command line: wave export is seeded and reproducible") {
  const auto dir = scratch("wave");
  REQUIRE(run_cli("wave-export --out \"" + (dir / "a").string() + "\"") == 0);
  REQUIRE(run_cli("wave-export --out \"" + (dir / "b").string() + "\"") == 0);
  REQUIRE(run_cli("wave-export --seed 99 --out \"" + (dir / "c").string() + "\"") == 0);
  const auto a = slurp(dir / "a" / "wave.csv");
  CHECK(a == slurp(dir / "b" / "wave.csv"));
  CHECK(a != slurp(dir / "c" / "wave.csv"));
  const auto lines = csv::read_lines(dir / "a" / "wave.csv");
  CHECK(lines.front() == "t,eta");
  CHECK(lines.size() == 16002);
  fs::remove_all(dir);
}

TEST_CASE("command line: synthesized hydrodynamic dataset loads back") {
  const auto dir = scratch("frd");
  REQUIRE(run_cli("frd-synth --out \"" + dir.string() + "\"") == 0);
  const auto frd = hydro::read_hydro_frd(dir / "frd.csv", dir / "ainf.csv");
  CHECK(frd.omega.size() > 50);
  CHECK(frd.a_inf(0, 0) > 0.0);
  fs::remove_all(dir);
}
