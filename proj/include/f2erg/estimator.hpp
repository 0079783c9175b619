#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "f2erg/ball_system.hpp"
#include "f2erg/cylinder.hpp"
#include "f2erg/finite_system.hpp"
#include "f2erg/glue.hpp"
#include "f2erg/rational.hpp"
#include "f2erg/word.hpp"

namespace f2erg {

inline constexpr double kConfidence = 0.99;
// Fewer non-zero walk scores than this marks a sampled cell under-powered.
inline constexpr std::size_t kMinHits = 10;

struct AvgEstimate {
  double mean = 0;
  double half_width = 0;
  std::size_t walks = 0;
  int n = 0;
  std::size_t hits = 0;     // walks with a non-zero score
  bool exact = false;       // no sampling was needed
  bool two_point = false;   // scores in {0, v}: Clopper-Pearson band below is exact
  double cp_lo = 0, cp_hi = 0;
  bool underpowered = false;

  // Confidence bounds: the exact binomial band for two-point cells, the
  // declared half-width otherwise.
  double lower() const noexcept { return two_point ? cp_lo : mean - half_width; }
  double upper() const noexcept { return two_point ? cp_hi : mean + half_width; }
};

// Two-sided normal quantile for the given confidence.
double normal_z(double confidence = kConfidence);
// Hoeffding half-width for K samples with values in an interval of `range`.
double hoeffding_half_width(double range, std::size_t K, double confidence = kConfidence);
// Exact binomial interval for hits / K.
std::pair<double, double> clopper_pearson(std::size_t hits, std::size_t K, double confidence = kConfidence);
// Normal interval from running sums; Hoeffding with `range` when the sample
// variance vanishes.
AvgEstimate summarize(double sum, double sumsq, std::size_t K, double range, int n);

inline void step(const FiniteSystem& sys, std::size_t& x, Letter s) { x = sys.shift(x, s); }
inline void step(const BallSystem& sys, BallPoint& p, Letter s) { sys.apply_shift(p, s); }
inline void step(const TowerSystem& sys, TowerPoint& p, Letter s) { sys.apply_shift(p, s); }

// Monte Carlo spherical average: mean of f(T_{g^-1} p) over K uniform g
// with |g| = n. T_{g^-1} is a length-n non-backtracking walk, so g is never
// materialized. `range` bounds sup f - inf f for the Hoeffding fallback.
template <class System, class F>
AvgEstimate mc_avg(const System& sys, F&& f, const typename System::Point& p, int n, std::size_t K,
                   CounterRng& rng, double range) {
  if (K == 0) throw std::invalid_argument("mc_avg needs K >= 1");
  if (n < 0) throw std::invalid_argument("mc_avg needs n >= 0");
  const CounterRng walks(rng());
  double sum = 0, sumsq = 0;
  for (std::size_t w = 0; w < K; ++w) {
    CounterRng r = walks.fork(w);
    typename System::Point q = p;
    if (n > 0) {
      Letter u = uniform_letter(r);
      step(sys, q, u);
      for (int j = 1; j < n; ++j) {
        u = nbw_step(u, r);
        step(sys, q, u);
      }
    }
    const double v = static_cast<double>(f(q));
    sum += v;
    sumsq += v * v;
  }
  return summarize(sum, sumsq, K, range, n);
}

// Exact spherical average by enumerating the sphere.
template <class System, class F>
Rational exact_avg_small(const System& sys, F&& f, const typename System::Point& p, int n,
                         int cap = kDefaultEnumerationCap) {
  Rational total = 0;
  for_each_in_sphere(
      n,
      [&](const ReducedWord& g) {
        typename System::Point q = p;
        for (std::size_t i = 0; i < g.length(); ++i) step(sys, q, inverse(g[i]));
        total += f(q);
      },
      cap);
  total /= static_cast<unsigned long>(sphere_size(n));
  return total;
}

// A lifted chain f_t on a tower, split into components. Component c is
// known exactly up to its anchor time; later values are reached by lifted
// walks: pi_* f_{t,c}(x) = E[f_{anchor,c}(y_L, slot_L)] with L = t - anchor.
class LiftedChain {
 public:
  virtual ~LiftedChain() = default;
  virtual std::size_t components() const = 0;
  virtual int anchor_time(std::size_t c) const = 0;
  // pi_* f_{t,c}(x) for t <= anchor_time(c).
  virtual double exact_pushforward(std::size_t c, int t, TowerPoint& x) const = 0;
  // f_{anchor,c}(y, slot) for the one component c that can be non-zero at y
  // (returned through `component`); 0 when none is.
  virtual double anchor_value(TowerPoint& y, Letter slot, std::size_t& component) const = 0;
  // Largest value anchor_value can return for component c.
  virtual double max_anchor_value(std::size_t c) const = 0;
  // Normalized mass of the chain.
  virtual double alpha() const = 0;
};

// The constant density c: exact at every time.
class ConstantChain final : public LiftedChain {
 public:
  explicit ConstantChain(double c) : c_(c) {}
  std::size_t components() const override { return 1; }
  int anchor_time(std::size_t) const override;
  double exact_pushforward(std::size_t, int, TowerPoint&) const override { return c_; }
  double anchor_value(TowerPoint&, Letter, std::size_t&) const override { return 0; }
  double max_anchor_value(std::size_t) const override { return 0; }
  double alpha() const override { return c_; }

 private:
  double c_;
};

// A delayed tower chain with anchor f_{-2m} per slice (m >= 1): slice c is
// exact up to time delay_c - 2m.
class DelayedChain final : public LiftedChain {
 public:
  explicit DelayedChain(DelayedDensity density, int anchor_m = 1);
  std::size_t components() const override { return density_.slices().size(); }
  int anchor_time(std::size_t c) const override { return density_.slices()[c].delay - 2 * m_; }
  double exact_pushforward(std::size_t c, int t, TowerPoint& x) const override;
  double anchor_value(TowerPoint& y, Letter slot, std::size_t& component) const override;
  double max_anchor_value(std::size_t c) const override;
  double alpha() const override { return to_double(density_.alpha()); }
  const DelayedDensity& density() const noexcept { return density_; }
  int anchor_m() const noexcept { return m_; }

 private:
  DelayedDensity density_;
  int m_;
  CylinderFunction anchor_;
  std::vector<double> scales_;
};

// Symmetric window of half-times: even times 2n for n_lo <= n <= n_hi.
struct Window {
  int n_lo = 0, n_hi = 0;
  std::vector<int> times() const;
};

struct Profile {
  std::vector<AvgEstimate> cells;  // one per time, ascending
  double sup = 0, sup_lower = 0, sup_upper = 0;
  double inf = 0, inf_lower = 0, inf_upper = 0;
  int argsup = 0;
  std::size_t walks = 0;
  std::size_t walks_flipped = 0;  // walks whose copy bits changed at some step
};

// pi_* f_t(x) for the given times, from K shared lifted walks. Components
// rejected by `keep` are dropped. The walk for walk index w is keyed by
// (walk_key, w), so two profiles with the same key follow the same letters.
Profile estimate_profile(const TowerSystem& sys, const LiftedChain& chain, const TowerPoint& x,
                         const std::vector<int>& times, std::size_t K, std::uint64_t walk_key,
                         const std::function<bool(std::size_t)>& keep = {});

// Profile over a window with sup and inf.
Profile maximal_profile(const TowerSystem& sys, const LiftedChain& chain, const TowerPoint& x, const Window& window,
                        std::size_t K, CounterRng& rng);

// Stratum of a surveyed point: 0 = X_a, 1 = X_b, d >= 1 = depth d, with the
// last stratum covering every depth beyond the table.
struct SurveyStratum {
  std::string name;
  double weight = 0;
  std::size_t allocated = 0;
  std::size_t passes = 0;
};

struct SurveyOptions {
  Window window;
  std::size_t points = 200;
  std::size_t K = 4000;
  double eps = 0.2;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  int depth_strata = 6;
  // Force bit `level` to `copy` on every surveyed point.
  std::optional<std::pair<std::size_t, std::uint8_t>> pin;
  // Keep only these chain components.
  std::function<bool(std::size_t)> keep;
};

struct SurveyPoint {
  std::size_t id = 0;
  std::size_t stratum = 0;
  std::string where;  // stratum, depth, first letters
  std::vector<std::uint8_t> bits;
  Profile profile;
  bool pass = false;
};

struct SurveyReport {
  std::size_t points = 0;
  Window window;
  double threshold = 0;  // 1 - eps
  double eps = 0;
  double pass_fraction = 0;  // stratum-weighted
  double pass_se = 0;
  double pass_lower = 0;     // pass_fraction - z * se
  double unsampled_weight = 0;  // strata without points, counted as failing
  std::size_t undecided = 0;    // points whose pass flips inside the cell CIs
  std::size_t underpowered_cells = 0;
  bool passed = false;          // pass_fraction >= 1 - eps
  std::vector<SurveyStratum> strata;
  std::vector<SurveyPoint> samples;
};

// Stratified mu-sample of the tower with per-point maximal profiles; a point
// passes when its estimated sup reaches 1 - eps.
SurveyReport population_survey(const TowerSystem& sys, const LiftedChain& chain, const SurveyOptions& opts);

// Re-scores a finished survey on the sub-window |n| <= N (the profiles must
// cover it) without drawing new walks.
SurveyReport restrict_survey(const SurveyReport& full, const Window& window);

struct WindowChoice {
  std::optional<int> N;
  std::vector<double> fractions;  // index N - 0, pass fraction of window [-N, N]
  bool monotone = true;           // fractions non-decreasing in N
  double best_fraction = 0;
  SurveyReport report;            // at the chosen N, or at N_max
};

// Smallest N <= N_max whose window [-N, N] passes the survey at level eps.
WindowChoice choose_window(const TowerSystem& sys, const LiftedChain& chain, double eps, int N_max,
                           SurveyOptions opts);

struct MixingResult {
  std::size_t level = 0;
  int M = 0, N = 0;
  double floor = 0;          // alpha/2 - eps/3
  double mean_inf = 0;       // stratum-weighted mean of the per-point inf
  double pass_fraction = 0;  // points with inf >= floor
  double required = 0;       // 1 - eps/3
  bool passed = false;
  double component_mass = 0;  // exact lifted mass of the copy-1 component
  SurveyReport report;
};

// Inf over even times in [2M - 2N, 2M + 2N] of the copy-1 component of
// level `level` seen from copy-2 points of that level.
MixingResult mixing_diagnostic(const TowerSystem& sys, const DelayedChain& chain, std::size_t level, int M, int N,
                               double eps, SurveyOptions opts);

struct MChoice {
  std::optional<int> M;
  std::vector<MixingResult> tried;
};

// Smallest candidate M passing mixing_diagnostic.
MChoice choose_M(const TowerSystem& sys, const DelayedChain& chain, std::size_t level, const std::vector<int>& candidates,
                 int N, double eps, const SurveyOptions& opts);

struct CouplingDeviation {
  double mean_abs = 0;       // mean |sup base - sup copy 1| over points
  double se = 0;
  double flip_fraction = 0;  // walks with a copy change
  double envelope = 0;       // max anchor value * flip fraction
  bool within_envelope = true;
  std::size_t points = 0;
};

// Copy-1 maximal values on window [-N, N] against the unglued base, with
// common random numbers (identical walk letters).
CouplingDeviation coupling_deviation(const TowerSystem& sys, const DelayedChain& chain, std::size_t level, int N,
                                     std::size_t points, std::size_t K, std::uint64_t seed, std::size_t workers = 1);

// Runs fn(i) for i in [0, count) on `workers` threads; results must be
// written by index so scheduling cannot affect them.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn);

}  // namespace f2erg
