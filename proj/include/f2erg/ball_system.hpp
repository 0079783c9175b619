#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "f2erg/lazy_word.hpp"
#include "f2erg/random.hpp"
#include "f2erg/word.hpp"

namespace f2erg {

// Which piece of the glued ball a point lies in. Interior points of depth
// n >= 1 lie in Y_n; boundary points are classes {x, reflect(x)} of Y_0
// words, X_a for words starting with b or b^-1, X_b for a or a^-1.
enum class Stratum : std::uint8_t { Interior, BoundaryA, BoundaryB };

std::string to_string(Stratum s);

// A point of the glued ball. For boundary points `word` is the canonical
// representative: it starts with b on X_a and with a on X_b.
struct BallPoint {
  Stratum stratum = Stratum::Interior;
  int depth = 1;
  LazyWord word = LazyWord::sample(0);

  bool interior() const noexcept { return stratum == Stratum::Interior; }
  bool in_Xa() const noexcept { return stratum == Stratum::BoundaryA; }
  bool in_Xb() const noexcept { return stratum == Stratum::BoundaryB; }

  // Exact equality (stratum, depth, and the whole word).
  bool same_as(BallPoint& other);
  // Short description: stratum, depth, first letters.
  std::string describe(std::size_t letters = 6);
};

LazyWord reflect(LazyWord w);

// The infinite ball with its boundary glued by reflection: the initial good
// system. Total measure 1: depth n has mass 3^-n, X_a and X_b mass 1/4 each.
class BallSystem {
 public:
  using Point = BallPoint;

  explicit BallSystem(std::size_t carry_bound = kCarryLookahead) : carry_bound_(carry_bound) {}

  // T_s p, in place.
  void apply_shift(BallPoint& p, Letter s) const;
  // T_w p; the rightmost letter acts first.
  void apply_word(BallPoint& p, const ReducedWord& w) const;

  // A point drawn from the normalized measure. The word's tail is keyed by
  // a draw from `rng`, so the point is a pure function of the stream.
  BallPoint sample_point(CounterRng& rng) const;
  BallPoint sample_interior(int depth, CounterRng& rng) const;
  BallPoint sample_boundary(Stratum which, CounterRng& rng) const;

  std::size_t carry_bound() const noexcept { return carry_bound_; }

 private:
  std::size_t carry_bound_;
};

// Base-3 value view of a boundary point's canonical word: digits of letter
// i+1 after letter i.
DigitStream digit_stream(BallPoint& p, std::size_t digits);

// Counts of violated clauses over a sample of points.
struct AxiomReport {
  std::size_t samples = 0;
  std::size_t interior = 0, boundary_a = 0, boundary_b = 0, depth_one = 0;
  // Pointwise clauses.
  std::size_t invariance_a = 0;   // T_a^{+-1} X_a != X_a
  std::size_t invariance_b = 0;   // T_b^{+-1} X_b != X_b
  std::size_t inclusion_ab = 0;   // T_a X_b not in T_b X_a u T_b^-1 X_a
  std::size_t inclusion_0 = 0;    // T_b^{+-1} X_a not in X_0
  std::size_t xb_to_y1 = 0;       // T_a X_b not in Y_1
  std::size_t invertibility = 0;  // T_s^-1 T_s p != p
  // Stratum law of the pushed-forward samples T_s p, per generator.
  std::vector<std::array<double, 3>> pushed_masses;  // interior, X_a, X_b

  std::size_t violations() const noexcept {
    return invariance_a + invariance_b + inclusion_ab + inclusion_0 + xb_to_y1 + invertibility;
  }
  double mass_interior() const { return static_cast<double>(interior) / static_cast<double>(samples); }
  double mass_a() const { return static_cast<double>(boundary_a) / static_cast<double>(samples); }
  double mass_b() const { return static_cast<double>(boundary_b) / static_cast<double>(samples); }
};

AxiomReport axiom_survey(const BallSystem& sys, std::size_t samples, std::uint64_t seed);

}  // namespace f2erg
