#include "f2erg/estimator.hpp"

#include <algorithm>
#include <atomic>
#include <climits>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/beta.hpp>

namespace f2erg {

namespace {

constexpr std::uint64_t kSurveyTag = 0x737572766579ULL;
constexpr std::uint64_t kWalkTag = 0x77616c6bULL;
constexpr std::uint64_t kCouplingTag = 0x636f75706cULL;

}  // namespace

double normal_z(double confidence) {
  const boost::math::normal dist;
  return boost::math::quantile(boost::math::complement(dist, (1 - confidence) / 2));
}

double hoeffding_half_width(double range, std::size_t K, double confidence) {
  return range * std::sqrt(std::log(2 / (1 - confidence)) / (2 * static_cast<double>(K)));
}

std::pair<double, double> clopper_pearson(std::size_t hits, std::size_t K, double confidence) {
  const double tail = (1 - confidence) / 2;
  const double h = static_cast<double>(hits), k = static_cast<double>(K);
  const double lo = hits == 0 ? 0.0 : boost::math::ibeta_inv(h, k - h + 1, tail);
  const double hi = hits == K ? 1.0 : boost::math::ibeta_inv(h + 1, k - h, 1 - tail);
  return {lo, hi};
}

AvgEstimate summarize(double sum, double sumsq, std::size_t K, double range, int n) {
  AvgEstimate e;
  e.walks = K;
  e.n = n;
  const double k = static_cast<double>(K);
  e.mean = sum / k;
  double var = K > 1 ? (sumsq - k * e.mean * e.mean) / (k - 1) : 0.0;
  if (var < 1e-12 * (e.mean * e.mean + 1)) var = 0;
  e.half_width = var > 0 ? normal_z() * std::sqrt(var / k) : hoeffding_half_width(range, K);
  return e;
}

int ConstantChain::anchor_time(std::size_t) const { return INT_MAX; }

DelayedChain::DelayedChain(DelayedDensity density, int anchor_m)
    : density_(std::move(density)), m_(anchor_m), anchor_(ancient_density(-2 * anchor_m)) {
  if (anchor_m < 1) throw std::invalid_argument("anchor offset m must be >= 1");
  for (const auto& s : density_.slices()) scales_.push_back(to_double(s.scale));
}

double DelayedChain::exact_pushforward(std::size_t c, int t, TowerPoint& x) const {
  const DensitySlice& slice = density_.slices()[c];
  const int m = t - slice.delay;
  if (m >= 0) throw std::logic_error("exact_pushforward past the anchor");
  if (x.slice_index() != c || !x.base.interior() || x.base.depth != -m) return 0;
  const CylinderFunction f = ancient_density(m);
  double total = 0;
  for (Letter s : kLetters) total += eval_density_double(f, x.base, s);
  return scales_[c] * total / 4;
}

double DelayedChain::anchor_value(TowerPoint& y, Letter slot, std::size_t& component) const {
  if (!y.base.interior() || y.base.depth != 2 * m_) return 0;
  component = y.slice_index();
  return scales_[component] * eval_density_double(anchor_, y.base, slot);
}

double DelayedChain::max_anchor_value(std::size_t c) const { return scales_[c] * 4 * std::pow(3.0, 2 * m_); }

std::vector<int> Window::times() const {
  std::vector<int> t;
  for (int n = n_lo; n <= n_hi; ++n) t.push_back(2 * n);
  return t;
}

Profile estimate_profile(const TowerSystem& sys, const LiftedChain& chain, const TowerPoint& x,
                         const std::vector<int>& times, std::size_t K, std::uint64_t walk_key,
                         const std::function<bool(std::size_t)>& keep) {
  if (times.empty()) throw std::invalid_argument("estimate_profile needs at least one time");
  if (K == 0) throw std::invalid_argument("estimate_profile needs K >= 1");
  const std::size_t C = chain.components();
  const std::size_t T = times.size();
  TowerPoint start = x;
  std::vector<double> offset(T, 0.0), range(T, 0.0);
  std::vector<std::size_t> walked(T, 0), walked_component(T, 0);
  int L_max = 0;
  for (std::size_t c = 0; c < C; ++c) {
    if (keep && !keep(c)) continue;
    for (std::size_t i = 0; i < T; ++i) {
      const int a = chain.anchor_time(c);
      if (times[i] <= a) {
        offset[i] += chain.exact_pushforward(c, times[i], start);
      } else {
        L_max = std::max(L_max, times[i] - a);
        ++walked[i];
        walked_component[i] = c;
        range[i] += chain.max_anchor_value(c);
      }
    }
  }
  // at_step[L * C + c]: time index scored by component c after L steps.
  std::vector<int> at_step(static_cast<std::size_t>(L_max + 1) * C, -1);
  for (std::size_t c = 0; c < C; ++c) {
    if (keep && !keep(c)) continue;
    for (std::size_t i = 0; i < T; ++i) {
      const int a = chain.anchor_time(c);
      if (times[i] > a) at_step[static_cast<std::size_t>(times[i] - a) * C + c] = static_cast<int>(i);
    }
  }

  Profile prof;
  std::vector<double> sum(T, 0.0), sumsq(T, 0.0), score(T, 0.0);
  std::vector<std::size_t> hits(T, 0);
  if (L_max > 0) {
    const CounterRng walks(walk_key);
    prof.walks = K;
    for (std::size_t w = 0; w < K; ++w) {
      CounterRng r = walks.fork(w);
      TowerPoint y = start;
      bool flipped = false;
      Letter u = uniform_letter(r);
      for (int L = 1; L <= L_max; ++L) {
        step(sys, y, u);
        const Letter next = nbw_step(u, r);
        std::size_t c = 0;
        const double v = chain.anchor_value(y, inverse(next), c);
        if (v != 0) {
          const int i = at_step[static_cast<std::size_t>(L) * C + c];
          if (i >= 0) score[static_cast<std::size_t>(i)] += v;
        }
        if (!flipped && y.bits != start.bits) flipped = true;
        u = next;
      }
      prof.walks_flipped += flipped;
      for (std::size_t i = 0; i < T; ++i) {
        if (score[i] == 0) continue;
        sum[i] += score[i];
        sumsq[i] += score[i] * score[i];
        ++hits[i];
        score[i] = 0;
      }
    }
  }

  for (std::size_t i = 0; i < T; ++i) {
    AvgEstimate e;
    if (walked[i] == 0) {
      e.mean = offset[i];
      e.n = times[i];
      e.exact = true;
    } else {
      e = summarize(sum[i], sumsq[i], K, range[i], times[i]);
      e.mean += offset[i];
      e.hits = hits[i];
      e.underpowered = hits[i] < kMinHits;
      if (walked[i] == 1) {
        const double v = chain.max_anchor_value(walked_component[i]);
        const auto [lo, hi] = clopper_pearson(hits[i], K);
        e.two_point = true;
        e.cp_lo = offset[i] + v * lo;
        e.cp_hi = offset[i] + v * hi;
      }
    }
    prof.cells.push_back(e);
  }
  prof.sup = prof.sup_lower = prof.sup_upper = -INFINITY;
  prof.inf = prof.inf_lower = prof.inf_upper = INFINITY;
  for (const auto& e : prof.cells) {
    if (e.mean > prof.sup) {
      prof.sup = e.mean;
      prof.argsup = e.n;
    }
    prof.sup_lower = std::max(prof.sup_lower, e.lower());
    prof.sup_upper = std::max(prof.sup_upper, e.upper());
    prof.inf = std::min(prof.inf, e.mean);
    prof.inf_lower = std::min(prof.inf_lower, e.lower());
    prof.inf_upper = std::min(prof.inf_upper, e.upper());
  }
  return prof;
}

Profile maximal_profile(const TowerSystem& sys, const LiftedChain& chain, const TowerPoint& x, const Window& window,
                        std::size_t K, CounterRng& rng) {
  return estimate_profile(sys, chain, x, window.times(), K, rng());
}

void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_at = count;
  std::exception_ptr failure;
  auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        // Report the lowest failing index so the error is scheduling-independent.
        if (i < failed_at) {
          failed_at = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, count); ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

namespace {

std::vector<SurveyStratum> stratum_table(int depth_strata, std::size_t points) {
  std::vector<SurveyStratum> strata;
  strata.push_back({"X_a", 0.25, 0, 0});
  strata.push_back({"X_b", 0.25, 0, 0});
  for (int d = 1; d <= depth_strata; ++d) strata.push_back({"Y_" + std::to_string(d), std::pow(3.0, -d), 0, 0});
  strata.push_back({"Y_>" + std::to_string(depth_strata), std::pow(3.0, -depth_strata) / 2, 0, 0});
  // Largest-remainder proportional allocation; ties go to the earlier stratum.
  std::size_t given = 0;
  std::vector<std::pair<double, std::size_t>> rest;
  for (std::size_t h = 0; h < strata.size(); ++h) {
    const double quota = strata[h].weight * static_cast<double>(points);
    strata[h].allocated = static_cast<std::size_t>(std::floor(quota));
    given += strata[h].allocated;
    rest.push_back({quota - std::floor(quota), h});
  }
  std::stable_sort(rest.begin(), rest.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
  for (std::size_t j = 0; given < points; ++j, ++given) ++strata[rest[j].second].allocated;
  return strata;
}

BallPoint sample_stratum(const BallSystem& base, std::size_t h, int depth_strata, CounterRng& rng) {
  if (h == 0) return base.sample_boundary(Stratum::BoundaryA, rng);
  if (h == 1) return base.sample_boundary(Stratum::BoundaryB, rng);
  const int d = static_cast<int>(h) - 1;
  if (d <= depth_strata) return base.sample_interior(d, rng);
  int depth = depth_strata + 1;
  while (rng.below(3) == 0) ++depth;
  return base.sample_interior(depth, rng);
}

void aggregate(SurveyReport& r, const std::function<bool(const SurveyPoint&)>& pass) {
  for (auto& s : r.strata) s.passes = 0;
  r.undecided = 0;
  r.underpowered_cells = 0;
  for (auto& p : r.samples) {
    p.pass = pass(p);
    r.strata[p.stratum].passes += p.pass;
    const bool could_pass = p.profile.sup_upper >= r.threshold;
    const bool could_fail = p.profile.sup_lower < r.threshold;
    if (could_pass && could_fail) ++r.undecided;
    for (const auto& c : p.profile.cells) {
      if (c.underpowered && c.upper() >= r.threshold) ++r.underpowered_cells;
    }
  }
  double frac = 0, var = 0, unsampled = 0;
  for (const auto& s : r.strata) {
    if (s.allocated == 0) {
      unsampled += s.weight;
      continue;
    }
    const double p = static_cast<double>(s.passes) / static_cast<double>(s.allocated);
    frac += s.weight * p;
    var += s.weight * s.weight * p * (1 - p) / static_cast<double>(s.allocated);
  }
  r.pass_fraction = frac;
  r.pass_se = std::sqrt(var);
  r.pass_lower = frac - normal_z() * r.pass_se;
  r.unsampled_weight = unsampled;
  r.passed = r.pass_fraction >= 1 - r.eps;
}

Profile restrict_profile(const Profile& full, const Window& window) {
  Profile p;
  p.walks = full.walks;
  p.walks_flipped = full.walks_flipped;
  p.sup = p.sup_lower = p.sup_upper = -INFINITY;
  p.inf = p.inf_lower = p.inf_upper = INFINITY;
  for (const auto& e : full.cells) {
    if (e.n < 2 * window.n_lo || e.n > 2 * window.n_hi) continue;
    p.cells.push_back(e);
    if (e.mean > p.sup) {
      p.sup = e.mean;
      p.argsup = e.n;
    }
    p.sup_lower = std::max(p.sup_lower, e.lower());
    p.sup_upper = std::max(p.sup_upper, e.upper());
    p.inf = std::min(p.inf, e.mean);
    p.inf_lower = std::min(p.inf_lower, e.lower());
    p.inf_upper = std::min(p.inf_upper, e.upper());
  }
  return p;
}

}  // namespace

SurveyReport population_survey(const TowerSystem& sys, const LiftedChain& chain, const SurveyOptions& opts) {
  if (opts.points == 0) throw std::invalid_argument("survey needs at least one point");
  SurveyReport r;
  r.points = opts.points;
  r.window = opts.window;
  r.eps = opts.eps;
  r.threshold = 1 - opts.eps;
  r.strata = stratum_table(opts.depth_strata, opts.points);
  std::vector<std::size_t> stratum_of;
  for (std::size_t h = 0; h < r.strata.size(); ++h) stratum_of.insert(stratum_of.end(), r.strata[h].allocated, h);
  r.samples.resize(opts.points);
  const std::vector<int> times = opts.window.times();
  const CounterRng root(derive_key(opts.seed, kSurveyTag));
  parallel_for(opts.points, opts.workers, [&](std::size_t i) {
    CounterRng rng = root.fork(i);
    SurveyPoint& sp = r.samples[i];
    sp.id = i;
    sp.stratum = stratum_of[i];
    TowerPoint x = sys.lift(sample_stratum(sys.base(), sp.stratum, opts.depth_strata, rng), rng);
    if (opts.pin) x.bits.at(opts.pin->first) = opts.pin->second;
    sp.bits = x.bits;
    sp.where = x.base.describe(4);
    sp.profile = estimate_profile(sys, chain, x, times, opts.K, rng.fork(kWalkTag).key(), opts.keep);
  });
  const double thr = r.threshold;
  aggregate(r, [thr](const SurveyPoint& p) { return p.profile.sup >= thr; });
  return r;
}

SurveyReport restrict_survey(const SurveyReport& full, const Window& window) {
  if (window.n_lo < full.window.n_lo || window.n_hi > full.window.n_hi) {
    throw std::invalid_argument("restrict_survey window must lie inside the surveyed window");
  }
  SurveyReport r = full;
  r.window = window;
  for (auto& p : r.samples) p.profile = restrict_profile(p.profile, window);
  const double thr = r.threshold;
  aggregate(r, [thr](const SurveyPoint& p) { return p.profile.sup >= thr; });
  return r;
}

WindowChoice choose_window(const TowerSystem& sys, const LiftedChain& chain, double eps, int N_max,
                           SurveyOptions opts) {
  if (N_max < 0) throw std::invalid_argument("N_max must be >= 0");
  opts.eps = eps;
  opts.window = Window{-N_max, N_max};
  const SurveyReport full = population_survey(sys, chain, opts);
  WindowChoice out;
  for (int N = 0; N <= N_max; ++N) {
    SurveyReport r = restrict_survey(full, Window{-N, N});
    if (!out.fractions.empty() && r.pass_fraction < out.fractions.back()) out.monotone = false;
    out.fractions.push_back(r.pass_fraction);
    out.best_fraction = std::max(out.best_fraction, r.pass_fraction);
    if (r.passed && !out.N) {
      out.N = N;
      out.report = std::move(r);
    }
  }
  if (!out.N) out.report = full;
  return out;
}

MixingResult mixing_diagnostic(const TowerSystem& sys, const DelayedChain& chain, std::size_t level, int M, int N,
                               double eps, SurveyOptions opts) {
  if (level >= sys.depth()) throw std::invalid_argument("mixing_diagnostic level out of range");
  MixingResult out;
  out.level = level;
  out.M = M;
  out.N = N;
  // The chain glued at `level` had normalized mass alpha before lifting;
  // recover it from the copy-2 attenuation 1 - alpha/2 of that level.
  const std::size_t copy2 = std::size_t{1} << level;
  const Rational attenuation = chain.density().slices()[copy2].scale / chain.density().slices()[0].scale;
  const double alpha = to_double(2 * (1 - attenuation));
  out.floor = alpha / 2 - eps / 3;
  out.required = 1 - eps / 3;
  for (std::size_t c = 0; c < chain.components(); ++c) {
    if (!(c & copy2)) out.component_mass += to_double(chain.density().slices()[c].scale);
  }
  opts.window = Window{M - N, M + N};
  opts.pin = std::make_pair(level, std::uint8_t{2});
  opts.keep = [copy2](std::size_t c) { return (c & copy2) == 0; };
  opts.eps = 1 - out.floor;  // threshold = floor, for the bookkeeping of undecided points
  out.report = population_survey(sys, chain, opts);
  const double floor = out.floor;
  aggregate(out.report, [floor](const SurveyPoint& p) { return p.profile.inf >= floor; });
  double mean = 0;
  for (const auto& p : out.report.samples) {
    const auto& s = out.report.strata[p.stratum];
    mean += s.weight * p.profile.inf / static_cast<double>(s.allocated);
  }
  out.mean_inf = mean;
  out.pass_fraction = out.report.pass_fraction;
  out.passed = out.pass_fraction >= out.required;
  out.report.passed = out.passed;
  return out;
}

MChoice choose_M(const TowerSystem& sys, const DelayedChain& chain, std::size_t level, const std::vector<int>& candidates,
                 int N, double eps, const SurveyOptions& opts) {
  MChoice out;
  for (int M : candidates) {
    out.tried.push_back(mixing_diagnostic(sys, chain, level, M, N, eps, opts));
    if (out.tried.back().passed) {
      out.M = M;
      break;
    }
  }
  return out;
}

CouplingDeviation coupling_deviation(const TowerSystem& sys, const DelayedChain& chain, std::size_t level, int N,
                                     std::size_t points, std::size_t K, std::uint64_t seed, std::size_t workers) {
  if (level >= sys.depth()) throw std::invalid_argument("coupling_deviation level out of range");
  const TowerSystem plain(std::vector<GlueLevel>{}, sys.base());
  const DelayedChain base_chain(DelayedDensity::base(), chain.anchor_m());
  const std::vector<int> times = Window{-N, N}.times();
  const CounterRng root(derive_key(seed, kCouplingTag));
  std::vector<double> dev(points), flips(points), envelope(points);
  parallel_for(points, workers, [&](std::size_t i) {
    CounterRng rng = root.fork(i);
    TowerPoint x = sys.sample_point(rng);
    x.bits[level] = 1;
    const std::uint64_t key = rng.fork(kWalkTag).key();
    const Profile glued = estimate_profile(sys, chain, x, times, K, key);
    const Profile unglued = estimate_profile(plain, base_chain, TowerPoint{x.base, {}}, times, K, key);
    dev[i] = std::abs(unglued.sup - glued.sup);
    flips[i] = static_cast<double>(glued.walks_flipped) / static_cast<double>(std::max<std::size_t>(glued.walks, 1));
    envelope[i] = base_chain.max_anchor_value(0) * flips[i];
  });
  CouplingDeviation out;
  out.points = points;
  double s = 0, ss = 0, f = 0, e = 0;
  for (std::size_t i = 0; i < points; ++i) {
    s += dev[i];
    ss += dev[i] * dev[i];
    f += flips[i];
    e += envelope[i];
    if (dev[i] > envelope[i] + 1e-9) out.within_envelope = false;
  }
  const double n = static_cast<double>(points);
  out.mean_abs = s / n;
  out.se = points > 1 ? std::sqrt(std::max(0.0, (ss - n * out.mean_abs * out.mean_abs) / (n - 1)) / n) : 0.0;
  out.flip_fraction = f / n;
  out.envelope = e / n;
  return out;
}

}  // namespace f2erg
