#include "f2erg/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "f2erg/errors.hpp"

namespace f2erg {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"run", {"command", "seed", "workers", "carry_bound"}},
      {"finite", {"systems", "max_states", "n_max", "parity_n_max"}},
      {"chain", {"n_lo", "n_hi"}},
      {"axioms", {"samples", "mass_tolerance"}},
      {"tower", {"k", "kappas", "Ms", "n_check", "strata_samples"}},
      {"estimator", {"anchor_m", "points", "K", "depth_strata"}},
      {"survey", {"mode", "eps", "N_max"}},
      {"glue",
       {"kappa", "eps", "N", "M_candidates", "mixing_points", "mixing_K", "copy2_threshold", "copy2_fraction",
        "coupling_points", "coupling_K"}},
      {"calibrate", {"trials", "n_max", "K", "required"}},
  };
  return keys;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

template <class Int>
Int parse_int(const std::string& key, const std::string& text) {
  Int v{};
  const std::string t = trim(text);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError(key + ": expected an integer, got '" + text + "'");
  }
  return v;
}

double parse_real(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t.find('/') != std::string::npos) {
    try {
      return to_double(parse_rational(t));
    } catch (const DomainError&) {
      throw ConfigError(key + ": expected a number, got '" + text + "'");
    }
  }
  double v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  }
  return v;
}

Rational parse_q(const std::string& key, const std::string& text) {
  try {
    return parse_rational(trim(text));
  } catch (const DomainError&) {
    throw ConfigError(key + ": expected a rational 'p/q', got '" + text + "'");
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string fmt_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

template <class T, class F>
std::string join(const std::vector<T>& xs, F&& f) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + f(xs[i]);
  return s;
}

bool is_command(const std::string& c) {
  return std::find(std::begin(kCommands), std::end(kCommands), c) != std::end(kCommands);
}

}  // namespace

ExperimentConfig parse_config(const std::string& ini_text) {
  pt::ptree tree;
  try {
    std::istringstream in(ini_text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  }
  ExperimentConfig c;
  for (const auto& [section, body] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) {
      if (body.empty()) throw ConfigError("key outside any section: '" + section + "'");
      throw ConfigError("unknown section [" + section + "]");
    }
    for (const auto& [key, node] : body) {
      if (!it->second.count(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
      const std::string v = node.get_value<std::string>();
      const std::string name = section + "." + key;
      if (section == "run") {
        if (key == "command") c.command = trim(v);
        if (key == "seed") c.seed = parse_int<std::uint64_t>(name, v);
        if (key == "workers") c.workers = parse_int<std::size_t>(name, v);
        if (key == "carry_bound") c.carry_bound = parse_int<std::size_t>(name, v);
      } else if (section == "finite") {
        if (key == "systems") c.finite_systems = parse_int<std::size_t>(name, v);
        if (key == "max_states") c.finite_max_states = parse_int<std::size_t>(name, v);
        if (key == "n_max") c.finite_n_max = parse_int<int>(name, v);
        if (key == "parity_n_max") c.parity_n_max = parse_int<int>(name, v);
      } else if (section == "chain") {
        if (key == "n_lo") c.chain_n_lo = parse_int<int>(name, v);
        if (key == "n_hi") c.chain_n_hi = parse_int<int>(name, v);
      } else if (section == "axioms") {
        if (key == "samples") c.axiom_samples = parse_int<std::size_t>(name, v);
        if (key == "mass_tolerance") c.mass_tolerance = parse_real(name, v);
      } else if (section == "tower") {
        if (key == "k") c.tower_k = parse_int<std::size_t>(name, v);
        if (key == "kappas") {
          c.tower_kappas.clear();
          for (const auto& item : split_list(v)) c.tower_kappas.push_back(parse_q(name, item));
        }
        if (key == "Ms") {
          c.tower_Ms.clear();
          for (const auto& item : split_list(v)) c.tower_Ms.push_back(parse_int<int>(name, item));
        }
        if (key == "n_check") c.tower_n_check = parse_int<int>(name, v);
        if (key == "strata_samples") c.strata_samples = parse_int<std::size_t>(name, v);
      } else if (section == "estimator") {
        if (key == "anchor_m") c.anchor_m = parse_int<int>(name, v);
        if (key == "points") c.points = parse_int<std::size_t>(name, v);
        if (key == "K") c.K = parse_int<std::size_t>(name, v);
        if (key == "depth_strata") c.depth_strata = parse_int<int>(name, v);
      } else if (section == "survey") {
        if (key == "mode") c.survey_mode = trim(v);
        if (key == "eps") c.eps = parse_q(name, v);
        if (key == "N_max") c.N_max = parse_int<int>(name, v);
      } else if (section == "glue") {
        if (key == "kappa") c.glue_kappa = parse_q(name, v);
        if (key == "eps") c.glue_eps = parse_q(name, v);
        if (key == "N") c.glue_N = parse_int<int>(name, v);
        if (key == "M_candidates") {
          c.M_candidates.clear();
          for (const auto& item : split_list(v)) c.M_candidates.push_back(parse_int<int>(name, item));
        }
        if (key == "mixing_points") c.mixing_points = parse_int<std::size_t>(name, v);
        if (key == "mixing_K") c.mixing_K = parse_int<std::size_t>(name, v);
        if (key == "copy2_threshold") c.copy2_threshold = parse_real(name, v);
        if (key == "copy2_fraction") c.copy2_fraction = parse_real(name, v);
        if (key == "coupling_points") c.coupling_points = parse_int<std::size_t>(name, v);
        if (key == "coupling_K") c.coupling_K = parse_int<std::size_t>(name, v);
      } else if (section == "calibrate") {
        if (key == "trials") c.calib_trials = parse_int<std::size_t>(name, v);
        if (key == "n_max") c.calib_n_max = parse_int<int>(name, v);
        if (key == "K") c.calib_K = parse_int<std::size_t>(name, v);
        if (key == "required") c.calib_required = parse_real(name, v);
      }
    }
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read configuration file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const ExperimentConfig& c) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  require(c.command.empty() || is_command(c.command), "run.command: unknown command '" + c.command + "'");
  require(c.workers >= 1, "run.workers must be >= 1");
  require(c.carry_bound >= 1, "run.carry_bound must be >= 1");
  require(c.finite_systems >= 1 && c.finite_max_states >= 1, "finite.systems and finite.max_states must be >= 1");
  require(c.finite_n_max >= 1 && c.finite_n_max <= 6, "finite.n_max must lie in [1, 6]");
  require(c.parity_n_max >= 0 && 2 * c.parity_n_max + 1 <= 12, "finite.parity_n_max must lie in [0, 5]");
  require(c.chain_n_lo <= c.chain_n_hi && c.chain_n_hi <= -2, "chain: need n_lo <= n_hi <= -2");
  require(c.axiom_samples >= 1, "axioms.samples must be >= 1");
  require(c.mass_tolerance > 0, "axioms.mass_tolerance must be positive");
  require(c.tower_kappas.size() == c.tower_k, "tower.kappas must list k values");
  require(c.tower_Ms.size() == c.tower_k, "tower.Ms must list k values");
  for (const auto& k : c.tower_kappas) {
    require(k > 0 && k < Rational(1, 4), "tower.kappas: kappa must lie in (0, 1/4), got " + to_string(k));
  }
  for (int M : c.tower_Ms) require(M >= 0, "tower.Ms must be non-negative");
  require(c.tower_n_check >= 2, "tower.n_check must be >= 2");
  require(c.anchor_m >= 1, "estimator.anchor_m must be >= 1");
  require(c.points >= 1 && c.K >= 1, "estimator.points and estimator.K must be >= 1");
  require(c.depth_strata >= 1, "estimator.depth_strata must be >= 1");
  require(c.survey_mode == "base" || c.survey_mode == "glued", "survey.mode must be 'base' or 'glued'");
  require(c.eps > 0 && c.eps <= 1, "survey.eps must lie in (0, 1]");
  require(c.N_max >= 0, "survey.N_max must be >= 0");
  require(c.glue_kappa > 0 && c.glue_kappa < Rational(1, 4),
          "glue.kappa: kappa must lie in (0, 1/4), got " + to_string(c.glue_kappa));
  require(c.glue_eps > 0 && c.glue_eps <= 1, "glue.eps must lie in (0, 1]");
  require(c.glue_N >= 0, "glue.N must be >= 0");
  require(!c.M_candidates.empty(), "glue.M_candidates must not be empty");
  for (int M : c.M_candidates) require(M >= 1, "glue.M_candidates must be >= 1");
  require(std::is_sorted(c.M_candidates.begin(), c.M_candidates.end()), "glue.M_candidates must be ascending");
  require(c.mixing_points >= 1 && c.mixing_K >= 1, "glue.mixing_points and glue.mixing_K must be >= 1");
  require(c.coupling_points >= 1 && c.coupling_K >= 1, "glue.coupling_points and glue.coupling_K must be >= 1");
  require(c.copy2_fraction >= 0 && c.copy2_fraction <= 1, "glue.copy2_fraction must lie in [0, 1]");
  require(c.calib_trials >= 1 && c.calib_K >= 1, "calibrate.trials and calibrate.K must be >= 1");
  require(c.calib_n_max >= 1 && c.calib_n_max <= 8, "calibrate.n_max must lie in [1, 8]");
  require(c.calib_required >= 0 && c.calib_required <= 1, "calibrate.required must lie in [0, 1]");
}

std::string echo_ini(const ExperimentConfig& c) {
  std::ostringstream o;
  auto q = [](const Rational& r) { return to_string(r); };
  auto i = [](int v) { return std::to_string(v); };
  o << "[run]\n";
  if (!c.command.empty()) o << "command = " << c.command << "\n";
  o << "seed = " << c.seed << "\nworkers = " << c.workers << "\ncarry_bound = " << c.carry_bound << "\n\n";
  o << "[finite]\nsystems = " << c.finite_systems << "\nmax_states = " << c.finite_max_states
    << "\nn_max = " << c.finite_n_max << "\nparity_n_max = " << c.parity_n_max << "\n\n";
  o << "[chain]\nn_lo = " << c.chain_n_lo << "\nn_hi = " << c.chain_n_hi << "\n\n";
  o << "[axioms]\nsamples = " << c.axiom_samples << "\nmass_tolerance = " << fmt_real(c.mass_tolerance) << "\n\n";
  o << "[tower]\nk = " << c.tower_k << "\nkappas = " << join(c.tower_kappas, q) << "\nMs = " << join(c.tower_Ms, i)
    << "\nn_check = " << c.tower_n_check << "\nstrata_samples = " << c.strata_samples << "\n\n";
  o << "[estimator]\nanchor_m = " << c.anchor_m << "\npoints = " << c.points << "\nK = " << c.K
    << "\ndepth_strata = " << c.depth_strata << "\n\n";
  o << "[survey]\nmode = " << c.survey_mode << "\neps = " << q(c.eps) << "\nN_max = " << c.N_max << "\n\n";
  o << "[glue]\nkappa = " << q(c.glue_kappa) << "\neps = " << q(c.glue_eps) << "\nN = " << c.glue_N
    << "\nM_candidates = " << join(c.M_candidates, i) << "\nmixing_points = " << c.mixing_points
    << "\nmixing_K = " << c.mixing_K << "\ncopy2_threshold = " << fmt_real(c.copy2_threshold)
    << "\ncopy2_fraction = " << fmt_real(c.copy2_fraction) << "\ncoupling_points = " << c.coupling_points
    << "\ncoupling_K = " << c.coupling_K << "\n\n";
  o << "[calibrate]\ntrials = " << c.calib_trials << "\nn_max = " << c.calib_n_max << "\nK = " << c.calib_K
    << "\nrequired = " << fmt_real(c.calib_required) << "\n";
  return o.str();
}

}  // namespace f2erg
