#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "json.hpp"

#include "f2erg/config.hpp"
#include "f2erg/errors.hpp"
#include "f2erg/pipeline.hpp"

using namespace f2erg;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig config_for(const std::string& command, const std::string& extra = "") {
  ExperimentConfig c = parse_config(extra);
  c.command = command;
  return c;
}

int run_tool(const std::string& args) {
  const int raw = std::system((std::string(F2ERG_TOOL) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("f2erg_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("verify-finite passes every identity") {
  const RunResult r = run_pipeline(config_for("verify-finite"));
  CHECK(r.status() == ExitStatus::Pass);
  CHECK(r.results["identity"]["systems_passed"] == 50);
  CHECK(r.results["identity"]["checks_passed"] == 250);
  REQUIRE(r.tables.size() == 1);
  CHECK(r.tables[0].rows.size() == 250);
}

TEST_CASE("verify-chain passes on n = -15..-2") {
  const RunResult r = run_pipeline(config_for("verify-chain"));
  CHECK(r.status() == ExitStatus::Pass);
  CHECK(r.results["chain"].size() == 14);
  CHECK(r.results["slot_rule"] == "first-letter");
}

TEST_CASE("build-tower renders alphas exactly and as decimals") {
  const RunResult r = run_pipeline(config_for("build-tower", "[tower]\nstrata_samples = 2000\n"));
  CHECK(r.status() == ExitStatus::Pass);
  const auto& a = r.results["alphas"];
  REQUIRE(a.size() == 5);
  CHECK(a[2]["exact"] == "39/64");
  CHECK(a[2]["decimal"].get<double>() == 0.609375);
  const std::string json = report_json(r);
  CHECK(json.find("\"39/64\"") != std::string::npos);
  CHECK(json.find("0.609375") != std::string::npos);
}

TEST_CASE("survey CSV has one row per point") {
  const RunResult r = run_pipeline(config_for("survey", "[estimator]\npoints = 30\nK = 300\n[survey]\nN_max = 3\n"));
  REQUIRE(!r.tables.empty());
  const CsvTable& t = r.tables[0];
  CHECK(t.rows.size() == 30);
  CHECK(t.header.front() == "id");
  const int N = r.results["N"].is_null() ? 3 : r.results["N"].get<int>();
  CHECK(t.header.size() == 4 + static_cast<std::size_t>(2 * N + 1) + 5);
  for (const auto& row : t.rows) CHECK(row.size() == t.header.size());
  CHECK(render_csv(t).rfind("id,stratum,where,bits,t=", 0) == 0);
}

TEST_CASE("exit statuses") {
  // A window of one time cannot reach the threshold on half the space.
  const RunResult failed = run_pipeline(config_for("survey", "[estimator]\npoints = 20\nK = 200\n[survey]\nN_max = 0\n"));
  CHECK(failed.status() == ExitStatus::CheckFailed);
  CHECK_FALSE(failed.passed());

  const RunResult infra = run_pipeline(config_for("axioms", "[run]\ncarry_bound = 1\n[axioms]\nsamples = 2000\n"));
  CHECK(infra.status() == ExitStatus::InfraFailed);
  CHECK(infra.infra_error.has_value());
  CHECK(report_json(infra).find("\"status\": \"infra-failed\"") != std::string::npos);

  CHECK_THROWS_AS(run_pipeline(config_for("")), ConfigError);
}

TEST_CASE("exit 0 only when every check passed") {
  for (const char* cmd : {"verify-finite", "verify-chain", "axioms", "calibrate"}) {
    const RunResult r = run_pipeline(config_for(cmd, "[axioms]\nsamples = 20000\n"));
    bool all = !r.infra_error;
    for (const auto& c : r.checks) all = all && c.passed;
    CHECK((r.status() == ExitStatus::Pass) == all);
    const auto j = nlohmann::json::parse(report_json(r));
    CHECK(j["passed"] == all);
    for (const auto& c : j["checks"]) CHECK(c.contains("passed"));
  }
}

TEST_CASE("reports are byte-identical across reruns and from the echoed config") {
  const ExperimentConfig c = config_for("calibrate", "[run]\nseed = 5\n[calibrate]\ntrials = 20\n");
  const RunResult a = run_pipeline(c);
  const RunResult b = run_pipeline(parse_config(echo_ini(a.config)));
  CHECK(report_json(a) == report_json(b));
  REQUIRE(a.tables.size() == b.tables.size());
  CHECK(render_csv(a.tables[0]) == render_csv(b.tables[0]));
  const RunResult other = run_pipeline(config_for("calibrate", "[run]\nseed = 6\n[calibrate]\ntrials = 20\n"));
  CHECK(render_csv(other.tables[0]) != render_csv(a.tables[0]));
}

TEST_CASE("command line tool") {
  const fs::path dir = scratch("tool");
  const fs::path cfg = dir / "run.ini";
  std::ofstream(cfg) << "[run]\nseed = 3\n[finite]\nsystems = 5\n";

  CHECK(run_tool("verify-finite --config " + cfg.string() + " --out " + (dir / "a").string()) == 0);
  CHECK(run_tool("verify-finite --config " + cfg.string() + " --out " + (dir / "b").string()) == 0);
  for (const char* f : {"verify-finite.json", "verify-finite.ini", "verify-finite_identity.csv"}) {
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
  }
  CHECK(fs::exists(dir / "a" / "verify-finite.timing.json"));
  const auto report = nlohmann::json::parse(slurp(dir / "a" / "verify-finite.json"));
  CHECK(report["seed"] == 3);
  CHECK(report["status"] == "pass");
  CHECK_FALSE(report["version"].get<std::string>().empty());

  // The echoed config reruns to the same bytes.
  CHECK(run_tool("verify-finite --config " + (dir / "a" / "verify-finite.ini").string() + " --out " +
                 (dir / "c").string()) == 0);
  CHECK(slurp(dir / "a" / "verify-finite.json") == slurp(dir / "c" / "verify-finite.json"));

  // Seed override.
  CHECK(run_tool("verify-finite --config " + cfg.string() + " --seed 11 --out " + (dir / "d").string()) == 0);
  CHECK(nlohmann::json::parse(slurp(dir / "d" / "verify-finite.json"))["seed"] == 11);

  // Output directory from the environment.
  const fs::path env_dir = dir / "env";
  CHECK(std::system(("F2ERG_OUT_DIR=" + env_dir.string() + " " + F2ERG_TOOL + " verify-chain > /dev/null").c_str()) ==
        0);
  CHECK(fs::exists(env_dir / "verify-chain.json"));

  const fs::path bad = dir / "bad.ini";
  std::ofstream(bad) << "[glue]\nkappa = 5/4\n";
  CHECK(run_tool("survey --config " + bad.string() + " --out " + dir.string()) == 2);
  std::ofstream(dir / "unknown.ini") << "[run]\nseeds = 1\n";
  CHECK(run_tool("axioms --config " + (dir / "unknown.ini").string()) == 2);
  CHECK(run_tool("plot --out " + dir.string()) == 2);
  CHECK(run_tool("axioms --config " + (dir / "missing.ini").string()) == 2);
  CHECK(run_tool("verify-finite --config " + cfg.string() + " --out " + dir.string() + " --seed x") == 2);

  std::ofstream(dir / "infra.ini") << "[run]\ncarry_bound = 1\n[axioms]\nsamples = 2000\n";
  CHECK(run_tool("axioms --config " + (dir / "infra.ini").string() + " --out " + dir.string()) == 3);
  std::ofstream(dir / "fail.ini") << "[estimator]\npoints = 20\nK = 200\n[survey]\nN_max = 0\n";
  CHECK(run_tool("survey --config " + (dir / "fail.ini").string() + " --out " + dir.string()) == 1);
  fs::remove_all(dir);
}
