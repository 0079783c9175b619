#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "f2erg/ball_system.hpp"
#include "f2erg/cylinder.hpp"
#include "f2erg/rational.hpp"

namespace f2erg {

// One gluing step: two copies of the previous system swapped by T_b on a
// coupling set E of the X_b boundary. E is a threshold set on an
// interleaved subsequence of the boundary digit stream: digits
// offset, offset + stride, ... read as a base-3 fraction in [0, 1),
// compared against threshold = 4 * kappa. Under mu restricted to X_b the
// fraction is uniform, so mu(E) = kappa exactly.
struct GlueLevel {
  Rational kappa;
  int M = 0;  // half of the time delay of copy 2
  Rational threshold;
  std::size_t digit_offset = 0;
  std::size_t digit_stride = 1;
  // Base-3 expansion of the threshold, truncated at the lookahead bound.
  std::vector<std::uint8_t> threshold_digits;
  bool threshold_terminates = true;

  // kappa in [0, 1/4], M >= 0.
  static GlueLevel make(const Rational& kappa, int M, std::size_t offset = 0, std::size_t stride = 1,
                        std::size_t bound = kCarryLookahead);
};

// x in E? x must lie in X_b. Throws LookaheadExceeded when the digits
// agree with the threshold for `bound` places.
bool membership_E(const GlueLevel& level, BallPoint& x, std::size_t bound = kCarryLookahead);

// A point of a k-level tower: a ball point and one copy index (1 or 2)
// per level.
struct TowerPoint {
  BallPoint base;
  std::vector<std::uint8_t> bits;

  bool same_as(TowerPoint& other) { return bits == other.bits && base.same_as(other.base); }
  // Bits read as a binary number, level 0 least significant, copy 2 = 1.
  std::size_t slice_index() const noexcept;
};

// The ball system glued k times. Total measure 2^k.
class TowerSystem {
 public:
  using Point = TowerPoint;

  TowerSystem() = default;
  explicit TowerSystem(std::vector<GlueLevel> levels, BallSystem base = BallSystem{})
      : base_(base), levels_(std::move(levels)) {}

  // T'_s. a-steps lift trivially; a b-step flips the bit of every level
  // whose E contains x, a b^-1-step every level whose E contains T_b^-1 x.
  void apply_shift(TowerPoint& p, Letter s) const;
  void apply_word(TowerPoint& p, const ReducedWord& w) const;

  // Normalized measure: base law times uniform copies.
  TowerPoint sample_point(CounterRng& rng) const;
  TowerPoint lift(BallPoint base, CounterRng& rng) const;

  const BallSystem& base() const noexcept { return base_; }
  const std::vector<GlueLevel>& levels() const noexcept { return levels_; }
  std::size_t depth() const noexcept { return levels_.size(); }
  Rational measure() const;

 private:
  BallSystem base_;
  std::vector<GlueLevel> levels_;
};

inline void glued_shift(const TowerSystem& sys, TowerPoint& p, Letter s) { sys.apply_shift(p, s); }

// Piece of a lifted chain living on one copy pattern: the base chain delayed
// by `delay` and scaled, f'_n(x, bits, s) = scale * f_{n - delay}(x, s) for
// the slice's bits at negative n.
struct DensitySlice {
  std::vector<std::uint8_t> bits;
  Rational scale;
  int delay = 0;
};

// Lifted chain on a tower, exact at negative times.
class DelayedDensity {
 public:
  // The base chain on the unglued ball.
  static DelayedDensity base();

  const std::vector<DensitySlice>& slices() const noexcept { return slices_; }
  std::size_t levels() const noexcept { return slices_.front().bits.size(); }
  // The normalized mass of the chain (norm / tower measure).
  const Rational& alpha() const noexcept { return alpha_; }

  // Exact lifted L1 norm and support mass at negative time n, summed over
  // slices from cylinder atoms.
  Rational l1_norm(int n) const;
  Rational support_mass(int n) const;
  // push_P_exact of every slice at time n equals the slice at n + 1.
  bool markov_step_exact(int n) const;

 private:
  friend DelayedDensity lift_density(const DelayedDensity&, const GlueLevel&, const Rational&);
  std::vector<DensitySlice> slices_;
  Rational alpha_;
};

// Copy 1 carries the chain at time n, copy 2 the chain at n - 2M scaled by
// 1 - alpha/2. alpha in (0, 1].
DelayedDensity lift_density(const DelayedDensity& chain, const GlueLevel& level, const Rational& alpha);

// alpha * (1 - alpha / 4); alpha in [0, 1].
Rational alpha_recursion(const Rational& alpha);

struct LevelCheck {
  std::size_t level = 0;
  Rational alpha;
  bool norm_matches = true;      // l1_norm(n) / 2^level == alpha for all checked n
  bool markov_exact = true;      // slice-wise P steps exact
  bool support_bounded = true;   // support_mass(n) <= 2^level * 3^n / 4
  double support_constant = 0;   // max_n support_mass(n) / 3^n
};

struct TowerBuild {
  TowerSystem system;
  std::vector<DelayedDensity> chains;  // level 0..k
  std::vector<Rational> alphas;
  std::vector<LevelCheck> checks;
  // Empirical stratum law of the top tower (X'_a, X'_b, X'_0).
  std::array<double, 3> strata{};
  std::size_t strata_samples = 0;

  bool exact_ok() const;
};

// k-level tower; level j uses kappas[j] and Ms[j]. Coupling sets read
// interleaved digit windows (offset j, stride k). Exact checks run over
// n in [-n_check, -1].
TowerBuild tower_build(std::size_t k, const std::vector<Rational>& kappas, const std::vector<int>& Ms,
                       std::uint64_t seed, std::size_t strata_samples = 20000, int n_check = 6);

}  // namespace f2erg
