#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "f2erg/letter.hpp"
#include "f2erg/random.hpp"
#include "f2erg/rational.hpp"
#include "f2erg/word.hpp"

namespace f2erg {

using Density = std::vector<Rational>;

// Function on states x letters, stored at index 4 * x + code(s). The lifted
// measure gives (x, s) the weight weight(x) / 4.
struct LiftedDensity {
  std::vector<Rational> values;

  Rational& at(std::size_t x, Letter s) { return values[4 * x + code(s)]; }
  const Rational& at(std::size_t x, Letter s) const { return values[4 * x + code(s)]; }
  friend bool operator==(const LiftedDensity&, const LiftedDensity&) = default;
};

// An F2-action on a finite weighted set, given by the permutations T_a, T_b.
class FiniteSystem {
 public:
  using Point = std::size_t;

  // Throws DomainError unless both maps are permutations of the same set
  // and every weight is positive and constant along both orbits.
  FiniteSystem(std::vector<std::size_t> perm_a, std::vector<std::size_t> perm_b, std::vector<Rational> weights);

  // Two states swapped by both generators, uniform weights.
  static FiniteSystem two_point_swap();
  // Random permutations on n states, random positive rational weights
  // constant on the orbits of the generated group.
  static FiniteSystem random(std::size_t n, CounterRng& rng);

  std::size_t size() const noexcept { return perm_a_.size(); }
  const Rational& weight(std::size_t x) const { return weights_[x]; }
  const std::vector<Rational>& weights() const noexcept { return weights_; }
  const std::vector<std::size_t>& perm_a() const noexcept { return perm_a_; }
  const std::vector<std::size_t>& perm_b() const noexcept { return perm_b_; }
  Rational total_weight() const;

  // T_s x for a single generator or inverse.
  std::size_t shift(std::size_t x, Letter s) const noexcept { return table_[code(s)][x]; }
  void shift_in_place(std::size_t& x, Letter s) const noexcept { x = shift(x, s); }

  // JSON document: {"states": N, "perm_a": [...], "perm_b": [...], "weights": ["p/q", ...]}.
  std::string to_json() const;
  static FiniteSystem from_json(const std::string& text);

 private:
  std::vector<std::size_t> perm_a_;
  std::vector<std::size_t> perm_b_;
  std::vector<Rational> weights_;
  std::array<std::vector<std::size_t>, 4> table_;
};

// T_w x; the rightmost letter acts first so that T_u T_v = T_{uv}.
std::size_t apply_group(const FiniteSystem& sys, const ReducedWord& w, std::size_t x);

// Exact spherical average by enumeration of the sphere of radius n.
Density avg_operator(const FiniteSystem& sys, const Density& f, int n, int cap = kDefaultEnumerationCap);

LiftedDensity pullback(const FiniteSystem& sys, const Density& f);
Density pushforward(const FiniteSystem& sys, const LiftedDensity& g);
LiftedDensity markov_P(const FiniteSystem& sys, const LiftedDensity& g);

// Compares avg_operator against pushforward(P^n pullback f) exactly.
bool check_identity(const FiniteSystem& sys, const Density& f, int n, int cap = kDefaultEnumerationCap);

// Pointwise max of the even averages A_2, A_4, ..., A_{2 n_max}.
Density maximal_function(const FiniteSystem& sys, const Density& f, int n_max, int cap = kDefaultEnumerationCap);

Rational integral(const FiniteSystem& sys, const Density& f);
Rational integral(const FiniteSystem& sys, const LiftedDensity& g);
Rational l1_norm(const FiniteSystem& sys, const LiftedDensity& g);

Density random_density(const FiniteSystem& sys, CounterRng& rng);
LiftedDensity random_lifted_density(const FiniteSystem& sys, CounterRng& rng);

}  // namespace f2erg
