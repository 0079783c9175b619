// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Reports are written to argv[1] (default ./acceptance_out).

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "f2erg/config.hpp"
#include "f2erg/pipeline.hpp"

using namespace f2erg;

namespace {

struct Run {
  std::string name;
  ExperimentConfig config;
  RunResult result;
};

ExperimentConfig config_for(const std::string& command, const std::string& extra = "") {
  ExperimentConfig c = parse_config(extra);
  c.command = command;
  return c;
}

bool check_named(const RunResult& r, const std::string& name) {
  for (const auto& c : r.checks) {
    if (c.name == name) return c.passed && !r.infra_error;
  }
  return false;
}

std::string detail_of(const RunResult& r, const std::string& name) {
  if (r.infra_error) return "infra: " + *r.infra_error;
  for (const auto& c : r.checks) {
    if (c.name == name) return c.detail;
  }
  return "missing check";
}

std::string all_details(const RunResult& r) {
  if (r.infra_error) return "infra: " + *r.infra_error;
  std::string s;
  for (const auto& c : r.checks) s += (s.empty() ? "" : "; ") + c.name + (c.passed ? "" : " FAILED") + ": " + c.detail;
  return s;
}

std::string fingerprint(const RunResult& r) {
  std::string s = report_json(r);
  for (const auto& t : r.tables) s += render_csv(t);
  return s;
}

int failures = 0;

void line(int id, bool ok, const std::string& title, const std::string& detail) {
  std::printf("[%s] %d %s: %s\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  std::fflush(stdout);
  failures += !ok;
}

std::string seconds(double s, double limit) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f s (limit %.0f s)", s, limit);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path out = argc > 1 ? argv[1] : "acceptance_out";
  std::vector<Run> runs{
      {"finite", config_for("verify-finite"), {}},
      {"chain", config_for("verify-chain"), {}},
      {"axioms", config_for("axioms"), {}},
      {"tower", config_for("build-tower"), {}},
      {"calibrate", config_for("calibrate"), {}},
      {"base", config_for("survey"), {}},
      {"glued", config_for("survey", "[survey]\nmode = glued\n"), {}},
  };
  for (auto& r : runs) {
    r.result = run_pipeline(r.config);
    emit_report(r.result, out);
  }
  const RunResult& finite = runs[0].result;
  const RunResult& chain = runs[1].result;
  const RunResult& axioms = runs[2].result;
  const RunResult& tower = runs[3].result;
  const RunResult& calib = runs[4].result;
  const RunResult& base = runs[5].result;
  const RunResult& glued = runs[6].result;

  const bool c1 = check_named(finite, "operator identity") && finite.wall_seconds <= 30;
  line(1, c1, "operator identity",
       detail_of(finite, "operator identity") + ", " + seconds(finite.wall_seconds, 30));

  line(2, check_named(finite, "parity"), "parity example", detail_of(finite, "parity"));

  const bool c3 = chain.status() == ExitStatus::Pass && chain.wall_seconds <= 10;
  line(3, c3, "ancient chain",
       "slot rule " + chain.results.value("slot_rule", std::string("?")) + "; " + all_details(chain) + ", " +
           seconds(chain.wall_seconds, 10));

  line(4, axioms.status() == ExitStatus::Pass, "good-system survey", all_details(axioms));

  bool prefix = false;
  if (!tower.infra_error && tower.results.contains("alphas") && tower.results["alphas"].size() >= 3) {
    const auto& a = tower.results["alphas"];
    prefix = a[0]["exact"] == "1" && a[1]["exact"] == "3/4" && a[2]["exact"] == "39/64";
  }
  const bool c5 = tower.status() == ExitStatus::Pass && prefix && tower.wall_seconds <= 60;
  line(5, c5, "norm recursion", all_details(tower) + ", " + seconds(tower.wall_seconds, 60));

  line(6, calib.status() == ExitStatus::Pass, "estimator calibration", detail_of(calib, "interval coverage"));

  bool c7 = base.status() == ExitStatus::Pass;
  std::string d7 = all_details(base);
  if (!base.infra_error) {
    const auto& s = base.results["survey"];
    c7 = c7 && s["points"].get<std::size_t>() >= 200 && !base.results["N"].is_null() &&
         base.results["N"].get<int>() <= 12;
    d7 = "N = " + base.results["N"].dump() + ", fraction " + s["pass_fraction"].dump() + ", lower " +
         s["pass_lower"].dump() + ", points " + s["points"].dump() + ", undecided " + s["undecided"].dump();
  }
  line(7, c7, "maximal-function survey (base)", d7);

  std::string d8 = all_details(glued);
  if (!glued.infra_error) {
    d8 = "M = " + glued.results["M"].dump() + ", N = " + glued.results["N"].dump() + ", copy-2 fraction " +
         glued.results["survey"]["pass_fraction"].dump() + " (copy-2 alone " +
         glued.results["copy2_only"]["pass_fraction"].dump() + "); " + all_details(glued);
  }
  line(8, glued.status() == ExitStatus::Pass, "one-gluing smoke survey", d8);

  std::size_t identical = 0;
  std::string differing;
  for (const auto& r : runs) {
    const RunResult again = run_pipeline(r.config);
    if (fingerprint(again) == fingerprint(r.result)) {
      ++identical;
    } else {
      differing += " " + r.name;
    }
  }
  line(9, identical == runs.size(), "reproducibility",
       std::to_string(identical) + "/" + std::to_string(runs.size()) + " reports byte-identical on rerun" +
           (differing.empty() ? "" : "; differ:" + differing));

  return failures == 0 ? 0 : 1;
}
