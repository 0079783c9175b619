#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "f2erg/ball_system.hpp"
#include "f2erg/config.hpp"

namespace f2erg {

enum class ExitStatus : int { Pass = 0, CheckFailed = 1, ConfigInvalid = 2, InfraFailed = 3 };

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct CsvTable {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct RunResult {
  ExperimentConfig config;
  nlohmann::ordered_json results = nlohmann::ordered_json::object();
  std::vector<Check> checks;
  std::vector<CsvTable> tables;
  std::optional<std::string> infra_error;
  double wall_seconds = 0;

  bool passed() const;
  ExitStatus status() const;
  // File stem shared by every output of the run.
  std::string stem() const;
};

const char* tool_version();

// Runs config.command. Infrastructure failures are captured in the result;
// configuration errors propagate as ConfigError.
RunResult run_pipeline(const ExperimentConfig& config);

// Deterministic JSON report; carries no wall-clock data.
std::string report_json(const RunResult& r);
std::string render_csv(const CsvTable& t);

// Writes <stem>.json, <stem>.ini (config echo), <stem>_<table>.csv and
// <stem>.timing.json into dir. Returns the paths written.
std::vector<std::filesystem::path> emit_report(const RunResult& r, const std::filesystem::path& dir);

// A bounded test function on the ball used for calibration runs: 1 on X_a,
// 3 on X_b, 2 on Y_1, 5 on Y_2, plus 1 for interior words starting with a.
double probe_function(BallPoint& x);

}  // namespace f2erg
