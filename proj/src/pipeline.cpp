#include "f2erg/pipeline.hpp"

#include <charconv>
#include <chrono>
#include <fstream>
#include <sstream>

#include "f2erg/cylinder.hpp"
#include "f2erg/errors.hpp"
#include "f2erg/estimator.hpp"
#include "f2erg/finite_system.hpp"
#include "f2erg/glue.hpp"

#ifndef F2ERG_VERSION
#define F2ERG_VERSION "unknown"
#endif

namespace f2erg {

namespace {

using json = nlohmann::ordered_json;

constexpr std::uint64_t kFiniteTag = 0x66696e697465ULL;
constexpr std::uint64_t kCalibrateTag = 0x63616c6962ULL;

std::string num(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string bits_string(const std::vector<std::uint8_t>& bits) {
  std::string s;
  for (auto b : bits) s += b ? '2' : '1';
  return s.empty() ? "-" : s;
}

void check(RunResult& r, std::string name, bool ok, std::string detail) {
  r.checks.push_back({std::move(name), ok, std::move(detail)});
}

json rational_json(const Rational& q) { return json{{"exact", to_string(q)}, {"decimal", to_double(q)}}; }

json survey_summary(const SurveyReport& s) {
  json strata = json::array();
  for (const auto& st : s.strata) {
    strata.push_back({{"name", st.name}, {"weight", st.weight}, {"allocated", st.allocated}, {"passes", st.passes}});
  }
  return json{{"points", s.points},
              {"window", {s.window.n_lo, s.window.n_hi}},
              {"threshold", s.threshold},
              {"pass_fraction", s.pass_fraction},
              {"pass_se", s.pass_se},
              {"pass_lower", s.pass_lower},
              {"unsampled_weight", s.unsampled_weight},
              {"undecided", s.undecided},
              {"underpowered_cells", s.underpowered_cells},
              {"passed", s.passed},
              {"strata", strata}};
}

// One row per surveyed point: id, stratum, location, copies, per-time
// estimates, sup with its interval, inf, pass.
CsvTable survey_table(std::string name, const SurveyReport& s) {
  CsvTable t;
  t.name = std::move(name);
  t.header = {"id", "stratum", "where", "bits"};
  for (int time : s.window.times()) t.header.push_back("t=" + std::to_string(time));
  for (const char* h : {"sup", "sup_lower", "sup_upper", "inf", "pass"}) t.header.push_back(h);
  for (const auto& p : s.samples) {
    std::vector<std::string> row{std::to_string(p.id), s.strata[p.stratum].name, p.where, bits_string(p.bits)};
    for (const auto& c : p.profile.cells) row.push_back(num(c.mean));
    row.push_back(num(p.profile.sup));
    row.push_back(num(p.profile.sup_lower));
    row.push_back(num(p.profile.sup_upper));
    row.push_back(num(p.profile.inf));
    row.push_back(p.pass ? "1" : "0");
    t.rows.push_back(std::move(row));
  }
  return t;
}

SurveyOptions survey_options(const ExperimentConfig& c) {
  SurveyOptions o;
  o.points = c.points;
  o.K = c.K;
  o.seed = c.seed;
  o.workers = c.workers;
  o.depth_strata = c.depth_strata;
  return o;
}

void run_verify_finite(const ExperimentConfig& c, RunResult& r) {
  const CounterRng root(derive_key(c.seed, kFiniteTag));
  CsvTable t{"identity", {"system", "states", "n", "identity"}, {}};
  std::size_t systems_ok = 0, checks_ok = 0, checks_total = 0;
  for (std::size_t i = 0; i < c.finite_systems; ++i) {
    CounterRng rng = root.fork(i);
    const std::size_t states = 1 + rng.below(static_cast<std::uint32_t>(c.finite_max_states));
    const FiniteSystem sys = FiniteSystem::random(states, rng);
    const Density f = random_density(sys, rng);
    bool all = true;
    for (int n = 1; n <= c.finite_n_max; ++n) {
      const bool ok = check_identity(sys, f, n);
      all = all && ok;
      checks_ok += ok;
      ++checks_total;
      t.rows.push_back({std::to_string(i), std::to_string(states), std::to_string(n), ok ? "1" : "0"});
    }
    systems_ok += all;
  }
  r.results["identity"] = {{"systems", c.finite_systems},
                           {"systems_passed", systems_ok},
                           {"n_max", c.finite_n_max},
                           {"checks", checks_total},
                           {"checks_passed", checks_ok}};
  check(r, "operator identity", systems_ok == c.finite_systems,
        std::to_string(systems_ok) + "/" + std::to_string(c.finite_systems) + " systems exact for n = 1.." +
            std::to_string(c.finite_n_max));

  // Two-point swap: even averages fix the indicator of state 0, odd ones
  // move it to state 1.
  const FiniteSystem swap = FiniteSystem::two_point_swap();
  const Density one0{Rational(1), Rational(0)};
  const Density one1{Rational(0), Rational(1)};
  json parity = json::array();
  bool parity_ok = true;
  for (int m = 0; m <= 2 * c.parity_n_max + 1; ++m) {
    const Density avg = m == 0 ? one0 : avg_operator(swap, one0, m);
    const bool ok = avg == (m % 2 == 0 ? one0 : one1);
    parity_ok = parity_ok && ok;
    parity.push_back({{"n", m}, {"value", {to_string(avg[0]), to_string(avg[1])}}, {"ok", ok}});
  }
  r.results["parity"] = parity;
  check(r, "parity", parity_ok, "two-point swap, n = 0.." + std::to_string(2 * c.parity_n_max + 1));
  r.tables.push_back(std::move(t));
}

void run_verify_chain(const ExperimentConfig& c, RunResult& r) {
  const SlotCalibration cal = calibrate_slot_rule(c.chain_n_lo, c.chain_n_hi);
  r.results["slot_rule"] = to_string(cal.rule);
  r.results["calibration_log"] = cal.log;
  CsvTable t{"chain", {"n", "atoms", "l1_norm", "support_mass", "expected_support", "step_exact"}, {}};
  json rows = json::array();
  bool norms = true, steps = true, supports = true;
  for (int n = c.chain_n_lo; n <= c.chain_n_hi; ++n) {
    const CylinderFunction f = ancient_density(n, cal.rule);
    const Rational norm = f.l1_norm();
    const Rational support = f.support_mass();
    const Rational expected = pow3(n) / 4;
    const bool step = push_P_exact(f) == ancient_density(n + 1, cal.rule);
    norms = norms && norm == 1;
    supports = supports && support == expected;
    steps = steps && step;
    rows.push_back({{"n", n},
                    {"atoms", f.size()},
                    {"l1_norm", to_string(norm)},
                    {"support_mass", to_string(support)},
                    {"step_exact", step}});
    t.rows.push_back({std::to_string(n), std::to_string(f.size()), to_string(norm), to_string(support),
                      to_string(expected), step ? "1" : "0"});
  }
  r.results["chain"] = rows;
  const std::string range = "n = " + std::to_string(c.chain_n_lo) + ".." + std::to_string(c.chain_n_hi);
  check(r, "unit norm", norms, range);
  check(r, "markov step", steps, range);
  check(r, "support mass 3^n/4", supports, range);
  r.tables.push_back(std::move(t));
}

void run_axioms(const ExperimentConfig& c, RunResult& r) {
  const AxiomReport a = axiom_survey(BallSystem(c.carry_bound), c.axiom_samples, c.seed);
  r.results["samples"] = a.samples;
  r.results["violations"] = {{"invariance_a", a.invariance_a},   {"invariance_b", a.invariance_b},
                             {"inclusion_ab", a.inclusion_ab},   {"inclusion_0", a.inclusion_0},
                             {"xb_to_y1", a.xb_to_y1},           {"invertibility", a.invertibility}};
  r.results["masses"] = {{"interior", a.mass_interior()}, {"X_a", a.mass_a()}, {"X_b", a.mass_b()}};
  json pushed = json::array();
  double worst = std::max({std::abs(a.mass_interior() - 0.5), std::abs(a.mass_a() - 0.25),
                           std::abs(a.mass_b() - 0.25)});
  for (const auto& m : a.pushed_masses) {
    pushed.push_back({m[0], m[1], m[2]});
    worst = std::max({worst, std::abs(m[0] - 0.5), std::abs(m[1] - 0.25), std::abs(m[2] - 0.25)});
  }
  r.results["pushed_masses"] = pushed;
  r.results["max_mass_deviation"] = worst;
  check(r, "pointwise clauses", a.violations() == 0, std::to_string(a.violations()) + " violations");
  check(r, "stratum masses", worst <= c.mass_tolerance,
        "max deviation " + num(worst) + " <= " + num(c.mass_tolerance));
}

void run_build_tower(const ExperimentConfig& c, RunResult& r) {
  const TowerBuild b = tower_build(c.tower_k, c.tower_kappas, c.tower_Ms, c.seed, c.strata_samples, c.tower_n_check);
  json alphas = json::array();
  for (const auto& a : b.alphas) alphas.push_back(rational_json(a));
  r.results["alphas"] = alphas;
  CsvTable t{"levels",
             {"level", "kappa", "M", "alpha", "alpha_decimal", "norm_matches", "markov_exact", "support_bounded",
              "support_constant"},
             {}};
  json levels = json::array();
  bool recursion = b.alphas.front() == 1, norms = true, markov = true, support = true;
  for (std::size_t j = 0; j < b.checks.size(); ++j) {
    const LevelCheck& lc = b.checks[j];
    if (j + 1 < b.alphas.size()) recursion = recursion && b.alphas[j + 1] == alpha_recursion(b.alphas[j]);
    norms = norms && lc.norm_matches;
    markov = markov && lc.markov_exact;
    support = support && lc.support_bounded;
    const std::string kappa = j == 0 ? "-" : to_string(c.tower_kappas[j - 1]);
    const std::string M = j == 0 ? "-" : std::to_string(c.tower_Ms[j - 1]);
    levels.push_back({{"level", lc.level},
                      {"kappa", kappa},
                      {"M", M},
                      {"alpha", rational_json(lc.alpha)},
                      {"norm_matches", lc.norm_matches},
                      {"markov_exact", lc.markov_exact},
                      {"support_bounded", lc.support_bounded},
                      {"support_constant", lc.support_constant}});
    t.rows.push_back({std::to_string(lc.level), kappa, M, to_string(lc.alpha), num(to_double(lc.alpha)),
                      lc.norm_matches ? "1" : "0", lc.markov_exact ? "1" : "0", lc.support_bounded ? "1" : "0",
                      num(lc.support_constant)});
  }
  r.results["levels"] = levels;
  r.results["strata"] = {{"X_a", b.strata[0]}, {"X_b", b.strata[1]}, {"X_0", b.strata[2]}};
  r.results["strata_samples"] = b.strata_samples;
  std::string list;
  for (const auto& a : b.alphas) list += (list.empty() ? "" : ", ") + to_string(a);
  check(r, "alpha recursion", recursion, "alpha = (" + list + ")");
  check(r, "norm ratio equals alpha", norms, "levels 0.." + std::to_string(c.tower_k));
  check(r, "markov steps exact", markov, "n in [-" + std::to_string(c.tower_n_check) + ", -1]");
  check(r, "support bounded", support, "support_mass(n) <= 2^j 3^n / 4");
  r.tables.push_back(std::move(t));
}

void run_survey_base(const ExperimentConfig& c, RunResult& r) {
  const TowerSystem sys({}, BallSystem(c.carry_bound));
  const DelayedChain chain(DelayedDensity::base(), c.anchor_m);
  const double eps = to_double(c.eps);
  const WindowChoice w = choose_window(sys, chain, eps, c.N_max, survey_options(c));
  r.results["eps"] = to_string(c.eps);
  r.results["N_max"] = c.N_max;
  r.results["N"] = w.N ? json(*w.N) : json(nullptr);
  r.results["fractions"] = w.fractions;
  r.results["monotone"] = w.monotone;
  r.results["best_fraction"] = w.best_fraction;
  r.results["survey"] = survey_summary(w.report);
  check(r, "window found", w.N.has_value(),
        w.N ? "N = " + std::to_string(*w.N) : "best fraction " + num(w.best_fraction));
  check(r, "pass fraction", w.report.pass_fraction >= 1 - eps,
        num(w.report.pass_fraction) + " >= " + num(1 - eps) + " (lower " + num(w.report.pass_lower) + ")");
  check(r, "window monotone", w.monotone, "pass fraction non-decreasing in N");
  r.tables.push_back(survey_table("points", w.report));
}

void run_survey_glued(const ExperimentConfig& c, RunResult& r) {
  const double eps = to_double(c.glue_eps);
  SurveyOptions opts = survey_options(c);

  // Window half-width from the unglued survey at level eps/3.
  int N = c.glue_N;
  if (N == 0) {
    const TowerSystem plain({}, BallSystem(c.carry_bound));
    const DelayedChain base(DelayedDensity::base(), c.anchor_m);
    const WindowChoice w = choose_window(plain, base, eps / 3, c.N_max, opts);
    N = w.N ? *w.N : c.N_max;
    r.results["base_window"] = {{"eps", eps / 3},
                                {"N", w.N ? json(*w.N) : json(nullptr)},
                                {"fractions", w.fractions},
                                {"best_fraction", w.best_fraction}};
  }
  r.results["N"] = N;

  // The copy-1 dynamics do not depend on M, so one tower serves every
  // candidate; M only moves the window.
  auto tower_for = [&](int M) {
    const GlueLevel level = GlueLevel::make(c.glue_kappa, M, 0, 1, c.carry_bound);
    return std::make_pair(TowerSystem({level}, BallSystem(c.carry_bound)),
                          DelayedChain(lift_density(DelayedDensity::base(), level, Rational(1)), c.anchor_m));
  };
  SurveyOptions mix = opts;
  mix.points = c.mixing_points;
  mix.K = c.mixing_K;
  const auto [probe_sys, probe_chain] = tower_for(c.M_candidates.front());
  const MChoice mc = choose_M(probe_sys, probe_chain, 0, c.M_candidates, N, eps, mix);
  json tried = json::array();
  CsvTable mt{"mixing", {"M", "N", "floor", "mean_inf", "pass_fraction", "required", "passed"}, {}};
  for (const auto& m : mc.tried) {
    tried.push_back({{"M", m.M},
                     {"floor", m.floor},
                     {"mean_inf", m.mean_inf},
                     {"pass_fraction", m.pass_fraction},
                     {"required", m.required},
                     {"component_mass", m.component_mass},
                     {"passed", m.passed}});
    mt.rows.push_back({std::to_string(m.M), std::to_string(m.N), num(m.floor), num(m.mean_inf), num(m.pass_fraction),
                       num(m.required), m.passed ? "1" : "0"});
  }
  const int M = mc.M ? *mc.M : c.M_candidates.back();
  r.results["mixing"] = {{"kappa", to_string(c.glue_kappa)},
                         {"eps", to_string(c.glue_eps)},
                         {"points", c.mixing_points},
                         {"K", c.mixing_K},
                         {"tried", tried},
                         {"M", mc.M ? json(*mc.M) : json(nullptr)}};
  check(r, "mixing floor", mc.M.has_value(),
        mc.M ? "M = " + std::to_string(*mc.M) : "no candidate reached the floor; using M = " + std::to_string(M));

  const auto [sys, chain] = tower_for(M);
  opts.window = Window{M - N, M + N};
  opts.pin = std::make_pair(std::size_t{0}, std::uint8_t{2});
  opts.eps = 1 - c.copy2_threshold;
  const SurveyReport full = population_survey(sys, chain, opts);

  // The same points and walks restricted to the copy-2 component: what the
  // delayed density reaches without any mixing.
  SurveyOptions own = opts;
  own.keep = [](std::size_t comp) { return (comp & 1) != 0; };
  const SurveyReport alone = population_survey(sys, chain, own);

  const double ceiling = to_double(chain.density().slices()[1].scale);
  r.results["M"] = M;
  r.results["copy2_ceiling"] = ceiling;
  r.results["survey"] = survey_summary(full);
  r.results["copy2_only"] = survey_summary(alone);
  const CouplingDeviation cd = coupling_deviation(sys, chain, 0, N, c.coupling_points, c.coupling_K, c.seed, c.workers);
  r.results["coupling"] = {{"points", cd.points},
                           {"mean_abs", cd.mean_abs},
                           {"se", cd.se},
                           {"flip_fraction", cd.flip_fraction},
                           {"envelope", cd.envelope},
                           {"within_envelope", cd.within_envelope}};
  check(r, "copy-2 sup above threshold", full.pass_fraction >= c.copy2_fraction,
        num(full.pass_fraction) + " of copy-2 points have sup >= " + num(c.copy2_threshold) + " (copy-2 alone " +
            num(alone.pass_fraction) + ")");
  r.tables.push_back(std::move(mt));
  r.tables.push_back(survey_table("points", full));
  r.tables.push_back(survey_table("copy2_only", alone));
}

void run_calibrate(const ExperimentConfig& c, RunResult& r) {
  const BallSystem ball(c.carry_bound);
  const CounterRng root(derive_key(c.seed, kCalibrateTag));
  CsvTable t{"trials", {"trial", "where", "n", "exact", "mean", "lower", "upper", "covered"}, {}};
  std::size_t covered = 0;
  for (std::size_t i = 0; i < c.calib_trials; ++i) {
    CounterRng rng = root.fork(i);
    BallPoint p = ball.sample_point(rng);
    const int n = 1 + static_cast<int>(rng.below(static_cast<std::uint32_t>(c.calib_n_max)));
    const double exact =
        to_double(exact_avg_small(ball, [](BallPoint& x) { return Rational(probe_function(x)); }, p, n));
    const AvgEstimate e = mc_avg(ball, probe_function, p, n, c.calib_K, rng, 6.0);
    const bool in = exact >= e.lower() - 1e-12 && exact <= e.upper() + 1e-12;
    covered += in;
    t.rows.push_back({std::to_string(i), p.describe(), std::to_string(n), num(exact), num(e.mean), num(e.lower()),
                      num(e.upper()), in ? "1" : "0"});
  }
  const double need = c.calib_required * static_cast<double>(c.calib_trials);
  r.results["trials"] = c.calib_trials;
  r.results["K"] = c.calib_K;
  r.results["covered"] = covered;
  r.results["confidence"] = kConfidence;
  check(r, "interval coverage", static_cast<double>(covered) >= need - 1e-9,
        std::to_string(covered) + "/" + std::to_string(c.calib_trials) + " inside the 99% interval");
  r.tables.push_back(std::move(t));
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + p.string());
}

}  // namespace

const char* tool_version() { return F2ERG_VERSION; }

double probe_function(BallPoint& x) {
  if (x.in_Xa()) return 1;
  if (x.in_Xb()) return 3;
  double v = x.depth == 1 ? 2 : x.depth == 2 ? 5 : 0;
  if (x.word.front() == Letter::a) v += 1;
  return v;
}

bool RunResult::passed() const {
  if (infra_error) return false;
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

ExitStatus RunResult::status() const {
  if (infra_error) return ExitStatus::InfraFailed;
  return passed() ? ExitStatus::Pass : ExitStatus::CheckFailed;
}

std::string RunResult::stem() const {
  return config.command == "survey" ? "survey-" + config.survey_mode : config.command;
}

RunResult run_pipeline(const ExperimentConfig& config) {
  validate(config);
  if (config.command.empty()) throw ConfigError("no command given");
  RunResult r;
  r.config = config;
  const auto start = std::chrono::steady_clock::now();
  try {
    const std::string& cmd = config.command;
    if (cmd == "verify-finite") run_verify_finite(config, r);
    if (cmd == "verify-chain") run_verify_chain(config, r);
    if (cmd == "axioms") run_axioms(config, r);
    if (cmd == "build-tower") run_build_tower(config, r);
    if (cmd == "survey" && config.survey_mode == "base") run_survey_base(config, r);
    if (cmd == "survey" && config.survey_mode == "glued") run_survey_glued(config, r);
    if (cmd == "calibrate") run_calibrate(config, r);
  } catch (const InfraError& e) {
    r.infra_error = e.what();
  } catch (const BoundaryContact& e) {
    r.infra_error = e.what();
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::string report_json(const RunResult& r) {
  json checks = json::array();
  for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  json j{{"tool", "f2erg"},
         {"version", tool_version()},
         {"command", r.config.command},
         {"seed", r.config.seed},
         {"workers", r.config.workers},
         {"config", echo_ini(r.config)},
         {"results", r.results},
         {"checks", checks},
         {"passed", r.passed()}};
  static const char* names[] = {"pass", "check-failed", "config-invalid", "infra-failed"};
  j["status"] = names[static_cast<int>(r.status())];
  if (r.infra_error) j["error"] = *r.infra_error;
  return j.dump(2) + "\n";
}

std::string render_csv(const CsvTable& t) {
  std::ostringstream o;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) o << (i ? "," : "") << csv_field(cells[i]);
    o << "\n";
  };
  line(t.header);
  for (const auto& row : t.rows) line(row);
  return o.str();
}

std::vector<std::filesystem::path> emit_report(const RunResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> out;
  const std::string stem = r.stem();
  auto put = [&](const std::string& name, const std::string& text) {
    out.push_back(dir / name);
    write_file(out.back(), text);
  };
  put(stem + ".json", report_json(r));
  put(stem + ".ini", echo_ini(r.config));
  for (const auto& t : r.tables) put(stem + "_" + t.name + ".csv", render_csv(t));
  json timing{{"command", r.config.command}, {"wall_seconds", r.wall_seconds}};
  put(stem + ".timing.json", timing.dump(2) + "\n");
  return out;
}

}  // namespace f2erg
