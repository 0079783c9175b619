#include "doctest.h"
#include "f2erg/errors.hpp"
#include "f2erg/finite_system.hpp"

using namespace f2erg;

namespace {

// Test-only oracle: spherical average over all 4^n letter strings that
// happen to be reduced, applying the inverse word letter by letter.
Density brute_force_average(const FiniteSystem& sys, const Density& f, int n) {
  Density out(sys.size(), Rational(0));
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= 4;
  std::size_t reduced = 0;
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::vector<Letter> g;
    std::size_t v = idx;
    for (int i = 0; i < n; ++i, v /= 4) g.push_back(from_code(static_cast<unsigned>(v % 4)));
    bool ok = true;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) ok = ok && g[i + 1] != inverse(g[i]);
    if (!ok) continue;
    ++reduced;
    for (std::size_t x = 0; x < sys.size(); ++x) {
      // g^-1 = g_n^-1 ... g_1^-1; its rightmost letter g_1^-1 acts first.
      std::size_t y = x;
      for (Letter s : g) y = sys.shift(y, inverse(s));
      out[x] += f[y];
    }
  }
  for (auto& q : out) q /= static_cast<long>(reduced);
  return out;
}

Density indicator(std::size_t n, std::size_t at) {
  Density f(n, Rational(0));
  f[at] = 1;
  return f;
}

}  // namespace

TEST_CASE("constructor validates permutations and orbit-constant weights") {
  CHECK_NOTHROW(FiniteSystem({1, 0}, {0, 1}, {Rational(1), Rational(1)}));
  CHECK_THROWS_AS(FiniteSystem({0, 0}, {0, 1}, {Rational(1), Rational(1)}), DomainError);
  CHECK_THROWS_AS(FiniteSystem({1, 0}, {0, 1}, {Rational(1), Rational(2)}), DomainError);
  CHECK_THROWS_AS(FiniteSystem({0, 1}, {0, 1}, {Rational(1), Rational(0)}), DomainError);
  CHECK_NOTHROW(FiniteSystem({0, 1}, {0, 1}, {Rational(1), Rational(2)}));
}

TEST_CASE("apply_group is a homomorphism") {
  CounterRng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const auto sys = FiniteSystem::random(1 + rng.below(10), rng);
    const auto u = sample_uniform_sphere(1 + static_cast<int>(rng.below(6)), rng);
    const auto v = sample_uniform_sphere(1 + static_cast<int>(rng.below(6)), rng);
    const std::size_t x = rng.below(static_cast<std::uint32_t>(sys.size()));
    CHECK(apply_group(sys, ReducedWord{}, x) == x);
    CHECK(apply_group(sys, u, apply_group(sys, invert(u), x)) == x);
    CHECK(apply_group(sys, reduce_concat(u, v), x) == apply_group(sys, u, apply_group(sys, v, x)));
  }
}

TEST_CASE("two-point swap: odd averages swap, even averages fix") {
  const auto sys = FiniteSystem::two_point_swap();
  const Density one0 = indicator(2, 0), one1 = indicator(2, 1);
  CHECK(avg_operator(sys, one0, 1) == one1);
  CHECK(avg_operator(sys, one0, 2) == one0);
  CHECK(check_identity(sys, one0, 4));
  LiftedDensity g = pullback(sys, one0);
  for (int i = 0; i < 4; ++i) g = markov_P(sys, g);
  CHECK(pushforward(sys, g) == one0);
  CHECK(maximal_function(sys, one0, 3) == one0);
}

TEST_CASE("averaging fixes constants and preserves integrals") {
  CounterRng rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    const auto sys = FiniteSystem::random(1 + rng.below(10), rng);
    const Density c(sys.size(), Rational(7, 3));
    CHECK(avg_operator(sys, c, 3) == c);
    CHECK(maximal_function(sys, c, 2) == c);
    const Density f = random_density(sys, rng);
    const Density af = avg_operator(sys, f, 3);
    CHECK(integral(sys, af) == integral(sys, f));
    for (const auto& v : af) CHECK(v >= 0);
    const Density m = maximal_function(sys, f, 2);
    const Density a2 = avg_operator(sys, f, 2);
    for (std::size_t x = 0; x < sys.size(); ++x) CHECK(m[x] >= a2[x]);
  }
}

TEST_CASE("avg_operator agrees with the brute-force string oracle") {
  CounterRng rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const auto sys = FiniteSystem::random(1 + rng.below(8), rng);
    const Density f = random_density(sys, rng);
    for (int n = 1; n <= 4; ++n) CHECK(avg_operator(sys, f, n) == brute_force_average(sys, f, n));
  }
}

TEST_CASE("pullback and pushforward") {
  CounterRng rng(24);
  const auto sys = FiniteSystem::random(6, rng);
  const Density zero(sys.size(), Rational(0));
  CHECK(pullback(sys, zero).values == std::vector<Rational>(4 * sys.size(), Rational(0)));
  const Density f = random_density(sys, rng);
  CHECK(pushforward(sys, pullback(sys, f)) == f);
  CHECK(l1_norm(sys, pullback(sys, f)) == integral(sys, f));

  LiftedDensity ones{std::vector<Rational>(4 * sys.size(), Rational(1))};
  CHECK(pushforward(sys, ones) == Density(sys.size(), Rational(1)));
  LiftedDensity spike{std::vector<Rational>(4 * sys.size(), Rational(0))};
  spike.at(2, Letter::b) = 4;
  CHECK(pushforward(sys, spike)[2] == 1);
  const LiftedDensity g = random_lifted_density(sys, rng);
  CHECK(integral(sys, pushforward(sys, g)) == integral(sys, g));
}

TEST_CASE("markov_P is Markov, integral preserving and contracting") {
  CounterRng rng(25);
  for (int trial = 0; trial < 30; ++trial) {
    const auto sys = FiniteSystem::random(1 + rng.below(10), rng);
    LiftedDensity ones{std::vector<Rational>(4 * sys.size(), Rational(1))};
    CHECK(markov_P(sys, ones) == ones);
    const LiftedDensity g = random_lifted_density(sys, rng);
    const LiftedDensity pg = markov_P(sys, g);
    CHECK(integral(sys, pg) == integral(sys, g));
    CHECK(l1_norm(sys, pg) <= l1_norm(sys, g));
    const Rational sup_g = *std::max_element(g.values.begin(), g.values.end());
    const Rational sup_pg = *std::max_element(pg.values.begin(), pg.values.end());
    CHECK(sup_pg <= sup_g);
  }
}

TEST_CASE("operator identity on random systems") {
  CounterRng rng(26);
  for (int trial = 0; trial < 20; ++trial) {
    const auto sys = FiniteSystem::random(1 + rng.below(10), rng);
    const Density f = random_density(sys, rng);
    for (int n = 1; n <= 5; ++n) CHECK(check_identity(sys, f, n));
  }
}

TEST_CASE("cap is enforced") {
  const auto sys = FiniteSystem::two_point_swap();
  CHECK_THROWS_AS(avg_operator(sys, indicator(2, 0), 5, 4), CapExceeded);
  CHECK_THROWS_AS(maximal_function(sys, indicator(2, 0), 7), CapExceeded);
}

TEST_CASE("JSON document round trip") {
  CounterRng rng(27);
  const auto sys = FiniteSystem::random(7, rng);
  const auto back = FiniteSystem::from_json(sys.to_json());
  CHECK(back.perm_a() == sys.perm_a());
  CHECK(back.perm_b() == sys.perm_b());
  CHECK(back.weights() == sys.weights());
  CHECK_THROWS_AS(FiniteSystem::from_json("{\"states\": 2}"), DomainError);
  CHECK_THROWS_AS(FiniteSystem::from_json(R"({"states":2,"perm_a":[0,1],"perm_b":[1,0],"weights":["1/2","x"]})"),
                  DomainError);
}
