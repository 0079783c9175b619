#include <cmath>

#include "doctest.h"
#include "f2erg/errors.hpp"
#include "f2erg/glue.hpp"

using namespace f2erg;

namespace {

// Digit fraction of the window, truncated, as an exact rational.
Rational window_value(const GlueLevel& level, BallPoint& x, std::size_t digits) {
  Rational v = 0;
  for (std::size_t i = 0; i < digits; ++i) {
    v += Rational(x.word.digit(level.digit_offset + i * level.digit_stride)) * pow3(-static_cast<long>(i) - 1);
  }
  return v;
}

TowerSystem one_level(const Rational& kappa) { return TowerSystem({GlueLevel::make(kappa, 3)}); }

}  // namespace

TEST_CASE("threshold expansion") {
  const GlueLevel ninth = GlueLevel::make(Rational(1, 36), 0);
  CHECK(ninth.threshold == Rational(1, 9));
  CHECK(ninth.threshold_terminates);
  CHECK(ninth.threshold_digits == std::vector<std::uint8_t>{0, 1});
  const GlueLevel sixteenth = GlueLevel::make(Rational(1, 64), 0);
  CHECK_FALSE(sixteenth.threshold_terminates);
  CHECK(sixteenth.threshold_digits.size() == kCarryLookahead);
  Rational back = 0;
  for (std::size_t i = 0; i < 20; ++i) back += Rational(sixteenth.threshold_digits[i]) * pow3(-static_cast<long>(i) - 1);
  CHECK(back < Rational(1, 16));
  CHECK(Rational(1, 16) - back < pow3(-20));
  CHECK_THROWS_AS(GlueLevel::make(Rational(5, 4), 1), DomainError);
  CHECK_THROWS_AS(GlueLevel::make(Rational(-1, 4), 1), DomainError);
}

TEST_CASE("membership_E: trivial thresholds") {
  const BallSystem sys;
  CounterRng rng(51);
  const GlueLevel empty = GlueLevel::make(Rational(0), 1);
  const GlueLevel full = GlueLevel::make(Rational(1, 4), 1);
  for (int i = 0; i < 1000; ++i) {
    BallPoint x = sys.sample_boundary(Stratum::BoundaryB, rng);
    CHECK_FALSE(membership_E(empty, x));
    CHECK(membership_E(full, x));
  }
  BallPoint xa = sys.sample_boundary(Stratum::BoundaryA, rng);
  CHECK_THROWS(membership_E(full, xa));
}

TEST_CASE("membership_E agrees with the truncated digit value") {
  const BallSystem sys;
  CounterRng rng(52);
  for (const Rational& kappa : {Rational(1, 64), Rational(1, 36), Rational(1, 10)}) {
    const GlueLevel level = GlueLevel::make(kappa, 1, 1, 3);
    for (int i = 0; i < 3000; ++i) {
      BallPoint x = sys.sample_boundary(Stratum::BoundaryB, rng);
      const Rational v = window_value(level, x, 40);
      // Ties at 40 digits have probability 3^-40; treat as impossible.
      CHECK(membership_E(level, x) == (v < level.threshold));
    }
  }
}

TEST_CASE("coupling set has measure kappa (4 sigma)") {
  const BallSystem sys;
  CounterRng rng(53);
  const int draws = 1000000;
  for (const Rational& kappa : {Rational(1, 64), Rational(1, 36)}) {
    const GlueLevel level = GlueLevel::make(kappa, 1);
    std::size_t hits = 0;
    for (int i = 0; i < draws; ++i) {
      BallPoint x = sys.sample_boundary(Stratum::BoundaryB, rng);
      hits += membership_E(level, x);
    }
    const double p = to_double(level.threshold);
    const double sigma = std::sqrt(p * (1 - p) / draws);
    CHECK(std::abs(static_cast<double>(hits) / draws - p) < 4 * sigma);
  }
}

TEST_CASE("interleaved windows give independent coupling sets") {
  const BallSystem sys;
  CounterRng rng(54);
  const GlueLevel l0 = GlueLevel::make(Rational(1, 16), 1, 0, 2);
  const GlueLevel l1 = GlueLevel::make(Rational(1, 16), 1, 1, 2);
  const int draws = 400000;
  std::size_t both = 0;
  for (int i = 0; i < draws; ++i) {
    BallPoint x = sys.sample_boundary(Stratum::BoundaryB, rng);
    both += membership_E(l0, x) && membership_E(l1, x);
  }
  const double p = 0.25 * 0.25;
  CHECK(std::abs(static_cast<double>(both) / draws - p) < 4 * std::sqrt(p * (1 - p) / draws));
}

TEST_CASE("glued shift: a-steps never touch the bits") {
  const TowerSystem sys = one_level(Rational(1, 8));
  CounterRng rng(55);
  for (int i = 0; i < 20000; ++i) {
    TowerPoint p = sys.sample_point(rng);
    const auto bits = p.bits;
    sys.apply_shift(p, rng.below(2) ? Letter::a : Letter::A);
    CHECK(p.bits == bits);
  }
}

TEST_CASE("glued shift: b-steps flip exactly on E") {
  const TowerSystem sys = one_level(Rational(1, 8));
  CounterRng rng(56);
  std::size_t flips = 0;
  for (int i = 0; i < 20000; ++i) {
    TowerPoint p = sys.sample_point(rng);
    const bool boundary_b = p.base.in_Xb();
    const bool in_E = boundary_b && membership_E(sys.levels()[0], p.base);
    for (Letter s : {Letter::b, Letter::B}) {
      TowerPoint q = p;
      sys.apply_shift(q, s);
      CHECK((q.bits != p.bits) == in_E);
      flips += q.bits != p.bits;
    }
    if (!p.base.in_Xb()) {
      // Off X_b the base moves like the unglued ball.
      BallPoint plain = p.base;
      sys.base().apply_shift(plain, Letter::b);
      TowerPoint q = p;
      sys.apply_shift(q, Letter::b);
      CHECK(q.base.same_as(plain));
    }
  }
  CHECK(flips > 0);
}

TEST_CASE("glued shift is invertible") {
  const TowerSystem sys({GlueLevel::make(Rational(1, 8), 2, 0, 2), GlueLevel::make(Rational(1, 5), 1, 1, 2)});
  CounterRng rng(57);
  std::size_t failures = 0;
  for (int i = 0; i < 100000; ++i) {
    TowerPoint p = sys.sample_point(rng);
    const Letter s = uniform_letter(rng);
    TowerPoint q = p;
    glued_shift(sys, q, s);
    glued_shift(sys, q, inverse(s));
    failures += !q.same_as(p);
  }
  CHECK(failures == 0);
}

TEST_CASE("tower stratum law (4 sigma)") {
  const TowerBuild t = tower_build(2, {Rational(1, 64), Rational(1, 32)}, {2, 3}, 7, 100000);
  const std::array<double, 3> law{0.25, 0.25, 0.5};
  for (std::size_t s = 0; s < 3; ++s) {
    const double sigma = std::sqrt(law[s] * (1 - law[s]) / 100000);
    CHECK(std::abs(t.strata[s] - law[s]) < 4 * sigma);
  }
  CHECK(t.system.measure() == 4);
}

TEST_CASE("alpha recursion") {
  CHECK(alpha_recursion(Rational(1)) == Rational(3, 4));
  CHECK(alpha_recursion(Rational(3, 4)) == Rational(39, 64));
  // 39/64 * (1 - 39/256) = 39 * 217 / 16384
  CHECK(alpha_recursion(Rational(39, 64)) == Rational(39 * 217, 16384));
  CHECK(alpha_recursion(Rational(0)) == 0);
  CHECK_THROWS_AS(alpha_recursion(Rational(3, 2)), DomainError);
  CHECK_THROWS_AS(alpha_recursion(Rational(-1, 2)), DomainError);
  Rational a = 1;
  for (int i = 0; i < 12; ++i) {
    const Rational next = alpha_recursion(a);
    CHECK(next < a);
    CHECK(next > 0);
    a = next;
  }
}

TEST_CASE("lifted density: scale, norm and support") {
  const GlueLevel level = GlueLevel::make(Rational(1, 64), 3);
  const DelayedDensity base = DelayedDensity::base();
  const DelayedDensity lifted = lift_density(base, level, Rational(1));
  REQUIRE(lifted.slices().size() == 2);
  CHECK(lifted.slices()[1].scale == Rational(1, 2));
  CHECK(lifted.slices()[1].delay == 6);
  for (int n = -10; n <= -1; ++n) {
    CHECK(lifted.l1_norm(n) == Rational(3, 2));
    CHECK(lifted.support_mass(n) <= 2 * Rational(1, 4) * pow3(n));
  }
  for (const Rational& alpha : {Rational(3, 4), Rational(39, 64), Rational(1, 3)}) {
    DelayedDensity scaled = lift_density(base, level, alpha);
    // Base chain of mass 1 stands in for mass alpha: copy 1 + (1 - alpha/2) copy 2.
    CHECK(scaled.l1_norm(-2) == 2 - alpha / 2);
  }
  CHECK_THROWS_AS(lift_density(base, level, Rational(0)), DomainError);
  CHECK_THROWS_AS(lifted.l1_norm(0), DomainError);
}

TEST_CASE("tower_build: exact alpha sequence and norms") {
  const TowerBuild t0 = tower_build(0, {}, {}, 1);
  CHECK(t0.alphas == std::vector<Rational>{Rational(1)});
  CHECK(t0.exact_ok());

  const TowerBuild t2 = tower_build(2, {Rational(1, 64), Rational(1, 64)}, {2, 3}, 1);
  CHECK(t2.alphas[2] == Rational(39, 64));
  CHECK(t2.chains[2].l1_norm(-3) == Rational(39, 64) * 4);
  CHECK(t2.exact_ok());

  const TowerBuild t4 = tower_build(4, {Rational(1, 64), Rational(1, 64), Rational(1, 64), Rational(1, 64)},
                                    {1, 2, 3, 4}, 1, 1000);
  REQUIRE(t4.alphas.size() == 5);
  for (std::size_t j = 0; j + 1 < t4.alphas.size(); ++j) {
    CHECK(t4.alphas[j + 1] == t4.alphas[j] * (1 - t4.alphas[j] / 4));
    CHECK(t4.alphas[j + 1] < t4.alphas[j]);
  }
  for (const auto& c : t4.checks) {
    CHECK(c.norm_matches);
    CHECK(c.markov_exact);
    CHECK(c.support_bounded);
  }
  CHECK(t4.chains[4].slices().size() == 16);

  CHECK_THROWS_AS(tower_build(2, {Rational(1, 64)}, {1, 2}, 1), DomainError);
  CHECK_THROWS_AS(tower_build(1, {Rational(5, 4)}, {1}, 1), DomainError);
  CHECK_THROWS_AS(tower_build(1, {Rational(0)}, {1}, 1), DomainError);
}
