#include "h1ns/io.hpp"

#include "catch_amalgamated.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;
using h1ns::io::Json;

namespace {

const fs::path& work_dir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "h1ns_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = std::string(H1NS_CLI_PATH) + " " + args + " >" + (work_dir() / "stdout.txt").string() +
                          " 2>" + (work_dir() / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

Json stdout_json() { return Json::parse(slurp(work_dir() / "stdout.txt")); }

std::string path(const std::string& name) { return (work_dir() / name).string(); }

void write_config(const std::string& name, const Json& cfg) { h1ns::io::write_json(work_dir() / name, cfg); }

const std::string& constants_file() {
  static const std::string file = [] {
    REQUIRE(run("constants --out " + path("constants.json")) == 0);
    return path("constants.json");
  }();
  return file;
}

}  // namespace

TEST_CASE("constants command", "[cli]") {
  const auto doc = h1ns::io::read_json(constants_file());
  CHECK(doc["format"] == "h1ns.constants");
  CHECK(doc["threshold_lower"].get<double>() >= 0.407);
  CHECK(doc["K_bracket"][1].get<double>() < 0.361);
  CHECK(doc["N_upper"].get<double>() <= 1.70);
  CHECK(doc["prior_threshold_reference"].get<double>() == 0.00724);
  CHECK(doc["header"]["command"] == "constants");

  CHECK(run("constants --omega 0.4") == 2);
  CHECK(slurp(work_dir() / "stderr.txt").find("omega") != std::string::npos);
  CHECK(run("constants --omega 0.7 --a 0") == 2);
}

TEST_CASE("kernel command", "[cli]") {
  REQUIRE(run("kernel --k 0 0 1") == 0);
  const auto doc = stdout_json();
  CHECK(doc["bracket"]["lower"].get<double>() == Catch::Approx(27.948781432238306).epsilon(1e-12));
  CHECK(doc["bracket"]["upper"].get<double>() == Catch::Approx(32.222051837877146).epsilon(1e-12));

  CHECK(run("kernel --k 0 0 2 --lambda 1.5") == 2);
  CHECK(run("kernel --k 0 0 1 --dim 2") == 2);
  CHECK(run("kernel") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("--help") == 0);
}

TEST_CASE("simulate and verify", "[cli]") {
  Json cfg{{"M", 4}, {"T", 1.0}, {"dt", 0.02}, {"datum", {{"seed", 1}, {"cutoff", 4}, {"h1_norm", 0.3}}}, {"output", "run.json"}};
  write_config("run_config.json", cfg);
  REQUIRE(run("simulate " + path("run_config.json") + " --constants " + constants_file()) == 0);
  const auto summary = stdout_json();
  CHECK(summary["certificate"]["covered"] == true);
  CHECK(summary["envelope"]["pass"] == true);
  CHECK(summary["samples"] == 51);
  CHECK(summary["initial_h1_norm"].get<double>() == Catch::Approx(0.3).epsilon(1e-12));
  REQUIRE(fs::exists(work_dir() / "run.json"));

  REQUIRE(run("verify " + path("run.json") + " --constants " + constants_file() + " --out " + path("verify.json")) == 0);
  const auto rep = h1ns::io::read_json(work_dir() / "verify.json");
  CHECK(rep["pass"] == true);
  CHECK(rep["control"]["pass"] == true);
  CHECK(rep["control"]["R"].size() == 51);
  CHECK(run("verify " + path("run.json") + " --constants " + constants_file() + " --safety 0.9") == 2);
  CHECK(run("verify " + path("run.json") + " --constants " + constants_file() + " --quad simpson") == 2);

  // reference with the same datum and time samples
  Json ref_cfg = cfg;
  ref_cfg["M"] = 6;
  ref_cfg["dt"] = 0.01;
  ref_cfg["record_every"] = 2;
  ref_cfg["output"] = "ref.json";
  write_config("ref_config.json", ref_cfg);
  REQUIRE(run("simulate " + path("ref_config.json") + " --constants " + constants_file() + " --summary " +
              path("ref_summary.json")) == 0);
  REQUIRE(run("verify " + path("run.json") + " --constants " + constants_file() + " --reference " + path("ref.json")) == 0);
  CHECK(stdout_json()["reference"]["violations"].empty());
}

TEST_CASE("simulate edge cases", "[cli]") {
  write_config("zero.json", Json{{"M", 3}, {"T", 0.5}, {"dt", 0.05}, {"datum", {{"seed", 3}, {"h1_norm", 0.0}}}, {"output", "zero_run.json"}});
  REQUIRE(run("simulate " + path("zero.json") + " --constants " + constants_file()) == 0);
  CHECK(stdout_json()["final_h1_norm"] == 0.0);
  REQUIRE(run("verify " + path("zero_run.json") + " --constants " + constants_file()) == 0);
  for (const auto& r : stdout_json()["control"]["R"]) CHECK(r.get<double>() == 0.0);

  write_config("big.json", Json{{"M", 3}, {"T", 0.2}, {"dt", 0.02}, {"datum", {{"seed", 3}, {"h1_norm", 0.5}}}});
  REQUIRE(run("simulate " + path("big.json") + " --constants " + constants_file()) == 0);
  const auto s = stdout_json();
  CHECK(s["certificate"]["covered"] == false);
  CHECK(s["certificate"].contains("note"));
  CHECK(s["envelope"].is_null());

  // datum from a field file, path relative to the config
  h1ns::io::write_json(work_dir() / "u0.json", h1ns::io::field_to_json(h1ns::random_field(5, 3, {3, 0.7}, 0.2)));
  write_config("from_file.json", Json{{"M", 3}, {"T", 0.1}, {"dt", 0.05}, {"datum", {{"file", "u0.json"}}}});
  REQUIRE(run("simulate " + path("from_file.json") + " --constants " + constants_file()) == 0);
  CHECK(stdout_json()["initial_h1_norm"].get<double>() == Catch::Approx(0.2).epsilon(1e-12));

  write_config("typo.json", Json{{"M", 3}, {"T", 0.1}, {"dt", 0.05}, {"datum", {{"seed", 1}, {"h1_norm", 0.1}}}, {"dtt", 1}});
  CHECK(run("simulate " + path("typo.json")) == 2);
  CHECK(slurp(work_dir() / "stderr.txt").find("dtt") != std::string::npos);
  write_config("nodatum.json", Json{{"M", 3}});
  CHECK(run("simulate " + path("nodatum.json")) == 2);
  CHECK(run("simulate " + path("does_not_exist.json")) == 2);
}

TEST_CASE("verify reports a corrupted trajectory", "[cli]") {
  write_config("c.json", Json{{"M", 3}, {"T", 0.4}, {"dt", 0.02}, {"datum", {{"seed", 2}, {"h1_norm", 0.2}}}, {"output", "c_run.json"}});
  REQUIRE(run("simulate " + path("c.json") + " --constants " + constants_file()) == 0);
  auto traj = h1ns::io::trajectory_from_json(h1ns::io::read_json(work_dir() / "c_run.json"));
  const auto kick = h1ns::random_field(9, 3, {3, 0.7}, 5.0);
  for (std::size_t i = 10; i < traj.size(); ++i) {
    traj.states[i] += kick;
    traj.h1_norms[i] = h1ns::sobolev_norm(traj.states[i], 1.0);
  }
  h1ns::io::write_json(work_dir() / "c_bad.json", h1ns::io::trajectory_to_json(traj));
  CHECK(run("verify " + path("c_bad.json") + " --constants " + constants_file() + " --out " + path("c_rep.json")) == 3);
  const auto rep = h1ns::io::read_json(work_dir() / "c_rep.json");
  CHECK(rep["pass"] == false);
  REQUIRE(rep["control"].contains("t_star"));
  CHECK(rep["control"]["t_star"].get<double>() >= 0.18 - 1e-12);  // first interval touching the kick
  CHECK(slurp(work_dir() / "stderr.txt").find("verification failed") != std::string::npos);
}
