#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "f2erg/config.hpp"
#include "f2erg/errors.hpp"
#include "f2erg/pipeline.hpp"

int main(int argc, char** argv) {
  using namespace f2erg;
  CLI::App app{"Spherical-average experiments on free group actions"};
  app.set_version_flag("--version", std::string(tool_version()));
  std::string command, config_path, out_dir;
  std::uint64_t seed = 0;
  app.add_option("command", command, "verify-finite | verify-chain | axioms | build-tower | survey | calibrate")
      ->required();
  app.add_option("--config", config_path, "INI configuration file");
  auto* seed_opt = app.add_option("--seed", seed, "override [run] seed");
  app.add_option("--out", out_dir, "output directory (default $F2ERG_OUT_DIR or .)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitStatus::ConfigInvalid);
  }

  ExperimentConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
    if (!cfg.command.empty() && cfg.command != command) {
      throw ConfigError("config command '" + cfg.command + "' does not match '" + command + "'");
    }
    cfg.command = command;
    if (*seed_opt) cfg.seed = seed;
    validate(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config-invalid: " << e.what() << "\n";
    return static_cast<int>(ExitStatus::ConfigInvalid);
  }

  if (out_dir.empty()) {
    const char* env = std::getenv("F2ERG_OUT_DIR");
    out_dir = env && *env ? env : ".";
  }

  try {
    const RunResult r = run_pipeline(cfg);
    for (const auto& p : emit_report(r, out_dir)) std::cout << "wrote " << p.string() << "\n";
    for (const auto& c : r.checks) std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
    if (r.infra_error) std::cerr << "infra-failed: " << *r.infra_error << "\n";
    return static_cast<int>(r.status());
  } catch (const ConfigError& e) {
    std::cerr << "config-invalid: " << e.what() << "\n";
    return static_cast<int>(ExitStatus::ConfigInvalid);
  } catch (const std::exception& e) {
    std::cerr << "infra-failed: " << e.what() << "\n";
    return static_cast<int>(ExitStatus::InfraFailed);
  }
}
