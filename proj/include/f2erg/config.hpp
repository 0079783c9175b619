#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "f2erg/rational.hpp"

namespace f2erg {

inline constexpr const char* kCommands[] = {"verify-finite", "verify-chain", "axioms",
                                            "build-tower",   "survey",       "calibrate"};

// Every experiment parameter, with defaults matching the acceptance runs.
// Loaded from an INI document; unknown sections or keys are rejected.
struct ExperimentConfig {
  std::string command;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  // Lookahead bound for lazy odometer carries and threshold comparisons.
  std::size_t carry_bound = 64;

  // [finite]
  std::size_t finite_systems = 50;
  std::size_t finite_max_states = 10;
  int finite_n_max = 5;
  int parity_n_max = 5;

  // [chain]
  int chain_n_lo = -15;
  int chain_n_hi = -2;

  // [axioms]
  std::size_t axiom_samples = 100000;
  double mass_tolerance = 0.005;

  // [tower]
  std::size_t tower_k = 4;
  std::vector<Rational> tower_kappas{Rational(1, 64), Rational(1, 64), Rational(1, 64), Rational(1, 64)};
  std::vector<int> tower_Ms{2, 2, 2, 2};
  int tower_n_check = 6;
  std::size_t strata_samples = 20000;

  // [estimator]
  int anchor_m = 1;
  std::size_t points = 200;
  std::size_t K = 4000;
  int depth_strata = 6;

  // [survey]
  std::string survey_mode = "base";  // base | glued
  Rational eps{1, 5};
  int N_max = 12;

  // [glue]
  Rational glue_kappa{1, 64};
  Rational glue_eps{3, 10};
  int glue_N = 0;  // 0: choose by a base survey at level eps/3
  std::vector<int> M_candidates{64, 128, 256, 512};
  std::size_t mixing_points = 40;
  std::size_t mixing_K = 8000;
  double copy2_threshold = 0.6;
  double copy2_fraction = 0.6;
  std::size_t coupling_points = 40;
  std::size_t coupling_K = 2000;

  // [calibrate]
  std::size_t calib_trials = 100;
  int calib_n_max = 5;
  std::size_t calib_K = 2000;
  double calib_required = 0.95;
};

// Throws ConfigError on malformed or out-of-range input.
ExperimentConfig parse_config(const std::string& ini_text);
ExperimentConfig load_config(const std::string& path);
// Checks cross-field constraints; throws ConfigError.
void validate(const ExperimentConfig& cfg);
// Canonical INI rendering; parse_config(echo_ini(c)) reproduces c.
std::string echo_ini(const ExperimentConfig& cfg);

}  // namespace f2erg
