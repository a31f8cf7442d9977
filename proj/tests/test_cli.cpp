#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "doctest.h"

// End-to-end checks against the installed binary.  Every invocation goes
// through the shell with output captured to files under a scratch directory.

namespace {

using nlohmann::json;

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string scratch_dir() {
  static std::string dir = [] {
    char tmpl[] = "/tmp/capdrum_cli_XXXXXX";
    const char* d = mkdtemp(tmpl);
    REQUIRE(d != nullptr);
    return std::string(d);
  }();
  return dir;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

RunResult run_cli(const std::string& args) {
  std::string base = scratch_dir();
  std::string out = base + "/out.txt", err = base + "/err.txt";
  std::string cmd = std::string(CAPDRUM_CLI_PATH) + " " + args + " > " + out +
                    " 2> " + err;
  int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string write_domain(const std::string& name, const std::string& text) {
  std::string path = scratch_dir() + "/" + name;
  std::ofstream f(path, std::ios::binary);
  f << text;
  return path;
}

const char* kBall = R"({"op": "ball", "center": [0, 0, 0], "radius": 1.0})";
const char* kCube =
    R"({"op": "box", "min": [0, 0, 0], "max": [1, 1, 1]})";

}  // namespace

TEST_CASE("constants subcommand emits the frozen values") {
  RunResult r = run_cli("constants --n 3 --gamma 0.5");
  REQUIRE(r.exit_code == 0);
  json j = json::parse(r.out);
  CHECK(j["constants"]["c_lower"].get<double>() ==
        doctest::Approx(1.0 / 112).epsilon(1e-12));
  CHECK(j["constants"]["kappa"].get<double>() ==
        doctest::Approx(1.0 / 14).epsilon(1e-12));
  CHECK(j["constants"]["C_upper"].get<double>() ==
        doctest::Approx(351232.0).epsilon(1e-9));
  CHECK(j["constants"]["N_cov"].get<int>() == 18);
  CHECK(j["config"]["subcommand"] == "constants");
  CHECK(j["config"]["n"].get<int>() == 3);
  CHECK(j["config"]["gamma"].get<double>() == 0.5);
}

TEST_CASE("fraction spacings parse exactly") {
  std::string ball = write_domain("ball.json", kBall);
  RunResult r = run_cli("capacity --set " + ball +
                        " --h 1/8 --bbox -1.2,-1.2,-1.2,1.2,1.2,1.2");
  REQUIRE(r.exit_code == 0);
  json j = json::parse(r.out);
  CHECK(j["config"]["h"].get<double>() == 0.125);
  CHECK(j["capacity"]["method"] == "grid");
  CHECK(j["capacity"]["value"].get<double>() ==
        doctest::Approx(4 * 3.14159265358979).epsilon(0.05));
}

TEST_CASE("output flag writes the same report to a file") {
  std::string target = scratch_dir() + "/report.json";
  RunResult direct = run_cli("constants --n 3 --gamma 0.5");
  RunResult filed =
      run_cli("constants --n 3 --gamma 0.5 --output " + target);
  REQUIRE(filed.exit_code == 0);
  CHECK(filed.out.empty());
  CHECK(slurp(target) == direct.out);
}

TEST_CASE("walk capacity is seed deterministic") {
  std::string ball = write_domain("ball.json", kBall);
  std::string base = "capacity --set " + ball +
                     " --method wos --walks 5000 --h 1/8 --bbox "
                     "-1.2,-1.2,-1.2,1.2,1.2,1.2";
  RunResult a = run_cli(base + " --seed 7");
  RunResult b = run_cli(base + " --seed 7");
  RunResult c = run_cli(base + " --seed 8");
  REQUIRE(a.exit_code == 0);
  CHECK(a.out == b.out);
  double va = json::parse(a.out)["capacity"]["value"].get<double>();
  double vc = json::parse(c.out)["capacity"]["value"].get<double>();
  CHECK(va != vc);
}

TEST_CASE("eigen subcommand matches the cube ground state") {
  std::string cube = write_domain("cube.json", kCube);
  RunResult r = run_cli("eigen --domain " + cube +
                        " --h 1/16 --bbox 0,0,0,1,1,1");
  REQUIRE(r.exit_code == 0);
  json j = json::parse(r.out);
  double lam = j["eigenvalue"]["extrapolated"].get<double>();
  CHECK(lam == doctest::Approx(3 * 9.8696044).epsilon(0.02));
}

TEST_CASE("radius subcommand finds the unit ball") {
  std::string ball = write_domain("ball.json", kBall);
  RunResult r = run_cli(
      "radius --domain " + ball +
      " --gamma 0.5 --h 1/8 --bbox -0.25,-0.25,-0.25,0.25,0.25,0.25 "
      "--r-min 0.5 --r-max 1.25 --r-steps 4");
  REQUIRE(r.exit_code == 0);
  json j = json::parse(r.out);
  json row = j["radii"].is_array() ? j["radii"][0] : j["radii"];
  CHECK(row["status"] == "finite");
  double rad = row["radius"].get<double>();
  CHECK(rad > 0.9);
  CHECK(rad < 1.2);
}

TEST_CASE("suite restricted to one domain passes end to end") {
  RunResult r = run_cli("suite --h 1/8 --only ball --format csv");
  REQUIRE(r.exit_code == 0);
  std::istringstream lines(r.out);
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line.rfind("domain,gamma,status", 0) == 0);
  int rows = 0;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    ++rows;
    CHECK(line.find("ball,") == 0);
    CHECK(line.find("sandwich-holds") != std::string::npos);
  }
  CHECK(rows == 3);
}

TEST_CASE("failure modes exit nonzero with a message") {
  std::string bad = write_domain("bad.json", "{\"op\": \"donut\"}");
  RunResult r = run_cli("eigen --domain " + bad + " --h 1/8 --bbox "
                        "-1,-1,-1,1,1,1");
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("error:") != std::string::npos);

  RunResult missing = run_cli("eigen --h 1/8");
  CHECK(missing.exit_code != 0);

  RunResult unknown = run_cli("frobnicate");
  CHECK(unknown.exit_code != 0);

  RunResult badgamma = run_cli("constants --n 3 --gamma 1.5");
  CHECK(badgamma.exit_code != 0);
}

TEST_CASE("help lists every subcommand") {
  RunResult r = run_cli("--help");
  REQUIRE(r.exit_code == 0);
  for (const char* name :
       {"constants", "capacity", "eigen", "radius", "bounds", "suite"}) {
    CHECK(r.out.find(name) != std::string::npos);
  }
}
