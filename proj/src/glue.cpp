#include "f2erg/glue.hpp"

#include <stdexcept>

#include "f2erg/errors.hpp"

namespace f2erg {

namespace {

constexpr std::uint64_t kBitsTag = 0x62697473ULL;
constexpr std::uint64_t kStrataTag = 0x7374726174ULL;

}  // namespace

GlueLevel GlueLevel::make(const Rational& kappa, int M, std::size_t offset, std::size_t stride, std::size_t bound) {
  if (kappa < 0 || kappa > Rational(1, 4)) throw DomainError("kappa must lie in [0, 1/4], got " + to_string(kappa));
  if (M < 0) throw DomainError("M must be non-negative");
  if (stride == 0) throw DomainError("digit stride must be positive");
  GlueLevel g;
  g.kappa = kappa;
  g.M = M;
  g.threshold = 4 * kappa;
  g.digit_offset = offset;
  g.digit_stride = stride;
  if (g.threshold > 0 && g.threshold < 1) {
    Rational rest = g.threshold;
    g.threshold_terminates = false;
    for (std::size_t i = 0; i < bound; ++i) {
      rest *= 3;
      mpz_class whole = rest.get_num() / rest.get_den();
      g.threshold_digits.push_back(static_cast<std::uint8_t>(whole.get_ui()));
      rest -= whole;
      if (rest == 0) {
        g.threshold_terminates = true;
        break;
      }
    }
  }
  return g;
}

bool membership_E(const GlueLevel& level, BallPoint& x, std::size_t bound) {
  if (!x.in_Xb()) throw std::invalid_argument("membership_E needs a point of X_b");
  if (level.threshold <= 0) return false;
  if (level.threshold >= 1) return true;
  for (std::size_t i = 0; i < bound; ++i) {
    if (i >= level.threshold_digits.size()) {
      // Threshold expansion ended: the rest of the value is >= 0.
      if (level.threshold_terminates) return false;
      break;
    }
    const unsigned d = x.word.digit(level.digit_offset + i * level.digit_stride);
    const unsigned t = level.threshold_digits[i];
    if (d != t) return d < t;
  }
  throw LookaheadExceeded("coupling-set comparison ran past " + std::to_string(bound) + " digits");
}

std::size_t TowerPoint::slice_index() const noexcept {
  std::size_t idx = 0;
  for (std::size_t l = 0; l < bits.size(); ++l) idx |= static_cast<std::size_t>(bits[l] == 2) << l;
  return idx;
}

void TowerSystem::apply_shift(TowerPoint& p, Letter s) const {
  if (s == Letter::b) {
    if (p.base.in_Xb()) {
      for (std::size_t l = 0; l < levels_.size(); ++l) {
        if (membership_E(levels_[l], p.base, base_.carry_bound())) p.bits[l] = 3 - p.bits[l];
      }
    }
    base_.apply_shift(p.base, s);
    return;
  }
  base_.apply_shift(p.base, s);
  if (s == Letter::B && p.base.in_Xb()) {
    for (std::size_t l = 0; l < levels_.size(); ++l) {
      if (membership_E(levels_[l], p.base, base_.carry_bound())) p.bits[l] = 3 - p.bits[l];
    }
  }
}

void TowerSystem::apply_word(TowerPoint& p, const ReducedWord& w) const {
  for (std::size_t i = w.length(); i-- > 0;) apply_shift(p, w[i]);
}

TowerPoint TowerSystem::lift(BallPoint base, CounterRng& rng) const {
  TowerPoint p{std::move(base), std::vector<std::uint8_t>(levels_.size(), 1)};
  CounterRng bits = rng.fork(kBitsTag);
  for (auto& b : p.bits) b = static_cast<std::uint8_t>(1 + bits.below(2));
  return p;
}

TowerPoint TowerSystem::sample_point(CounterRng& rng) const {
  BallPoint base = base_.sample_point(rng);
  return lift(std::move(base), rng);
}

Rational TowerSystem::measure() const {
  mpz_class m = 1;
  m <<= static_cast<mp_bitcnt_t>(levels_.size());
  return Rational(m);
}

DelayedDensity DelayedDensity::base() {
  DelayedDensity d;
  d.slices_.push_back(DensitySlice{{}, Rational(1), 0});
  d.alpha_ = 1;
  return d;
}

Rational DelayedDensity::l1_norm(int n) const {
  if (n >= 0) throw DomainError("exact norms are available at negative times only");
  Rational total = 0;
  for (const auto& s : slices_) total += s.scale * ancient_density(n - s.delay).l1_norm();
  return total;
}

Rational DelayedDensity::support_mass(int n) const {
  if (n >= 0) throw DomainError("exact support is available at negative times only");
  Rational total = 0;
  for (const auto& s : slices_) {
    if (s.scale != 0) total += ancient_density(n - s.delay).support_mass();
  }
  return total;
}

bool DelayedDensity::markov_step_exact(int n) const {
  if (n > -2) throw DomainError("exact steps need n <= -2");
  for (const auto& s : slices_) {
    if (!(push_P_exact(ancient_density(n - s.delay)) == ancient_density(n + 1 - s.delay))) return false;
  }
  return true;
}

Rational alpha_recursion(const Rational& alpha) {
  if (alpha < 0 || alpha > 1) throw DomainError("alpha must lie in [0, 1], got " + to_string(alpha));
  Rational next = alpha * (1 - alpha / 4);
  next.canonicalize();
  return next;
}

DelayedDensity lift_density(const DelayedDensity& chain, const GlueLevel& level, const Rational& alpha) {
  if (alpha <= 0 || alpha > 1) throw DomainError("alpha must lie in (0, 1], got " + to_string(alpha));
  Rational attenuation = 1 - alpha / 2;
  attenuation.canonicalize();
  DelayedDensity out;
  for (std::uint8_t copy : {1, 2}) {
    for (const auto& s : chain.slices_) {
      DensitySlice lifted = s;
      lifted.bits.push_back(copy);
      if (copy == 2) {
        lifted.scale *= attenuation;
        lifted.delay += 2 * level.M;
      }
      out.slices_.push_back(std::move(lifted));
    }
  }
  out.alpha_ = alpha_recursion(alpha);
  return out;
}

bool TowerBuild::exact_ok() const {
  for (const auto& c : checks) {
    if (!c.norm_matches || !c.markov_exact || !c.support_bounded) return false;
  }
  return true;
}

TowerBuild tower_build(std::size_t k, const std::vector<Rational>& kappas, const std::vector<int>& Ms,
                       std::uint64_t seed, std::size_t strata_samples, int n_check) {
  if (kappas.size() != k || Ms.size() != k) throw DomainError("tower_build needs k kappas and k values of M");
  std::vector<GlueLevel> levels;
  for (std::size_t j = 0; j < k; ++j) {
    if (kappas[j] <= 0 || kappas[j] >= Rational(1, 4)) {
      throw DomainError("kappa must lie in (0, 1/4), got " + to_string(kappas[j]));
    }
    levels.push_back(GlueLevel::make(kappas[j], Ms[j], j, k));
  }
  TowerBuild out;
  out.chains.push_back(DelayedDensity::base());
  out.alphas.push_back(Rational(1));
  for (std::size_t j = 0; j < k; ++j) {
    out.chains.push_back(lift_density(out.chains.back(), levels[j], out.alphas.back()));
    out.alphas.push_back(alpha_recursion(out.alphas.back()));
  }
  for (std::size_t j = 0; j <= k; ++j) {
    const DelayedDensity& chain = out.chains[j];
    LevelCheck c;
    c.level = j;
    c.alpha = out.alphas[j];
    mpz_class copies = 1;
    copies <<= static_cast<mp_bitcnt_t>(j);
    for (int n = -n_check; n <= -1; ++n) {
      const Rational ratio = chain.l1_norm(n) / Rational(copies);
      if (ratio != out.alphas[j] || chain.alpha() != out.alphas[j]) c.norm_matches = false;
      if (n <= -2 && !chain.markov_step_exact(n)) c.markov_exact = false;
      const Rational support = chain.support_mass(n);
      if (support > Rational(copies) * pow3(n) / 4) c.support_bounded = false;
      c.support_constant = std::max(c.support_constant, to_double(support / pow3(n)));
    }
    out.checks.push_back(std::move(c));
  }
  out.system = TowerSystem(std::move(levels));
  std::array<std::size_t, 3> counts{};
  const CounterRng root(derive_key(seed, kStrataTag));
  for (std::size_t i = 0; i < strata_samples; ++i) {
    CounterRng rng = root.fork(i);
    TowerPoint p = out.system.sample_point(rng);
    ++counts[p.base.in_Xa() ? 0 : p.base.in_Xb() ? 1 : 2];
  }
  out.strata_samples = strata_samples;
  for (std::size_t s = 0; s < 3; ++s) {
    out.strata[s] = strata_samples ? static_cast<double>(counts[s]) / static_cast<double>(strata_samples) : 0.0;
  }
  return out;
}

}  // namespace f2erg
