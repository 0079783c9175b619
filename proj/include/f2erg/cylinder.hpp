#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "f2erg/ball_system.hpp"
#include "f2erg/rational.hpp"
#include "f2erg/word.hpp"

namespace f2erg {

// The set {(x, s) : x in Y_depth, x begins with prefix, s = slot} carrying
// a constant value.
struct CylinderAtom {
  int depth = 1;
  ReducedWord prefix;
  Letter slot = Letter::a;
  Rational value;

  friend bool operator==(const CylinderAtom&, const CylinderAtom&) = default;
};

// Lifted-measure mass of an atom's set: 3^-depth * P(prefix) / 4.
Rational atom_mass(const CylinderAtom& atom);

// Finite combination of interior cylinder atoms on the lifted ball.
// Atoms are kept disjoint and in canonical (coarsest, sorted) form, so two
// functions are equal iff their atom lists are.
class CylinderFunction {
 public:
  CylinderFunction() = default;
  // Overlapping atoms are summed.
  explicit CylinderFunction(std::vector<CylinderAtom> atoms);

  const std::vector<CylinderAtom>& atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }

  Rational l1_norm() const;
  Rational support_mass() const;
  int min_depth() const;

  // One record per line: "<depth> <prefix or -> <slot> <p/q>".
  std::string serialize() const;
  static CylinderFunction parse(const std::string& text);

  friend bool operator==(const CylinderFunction&, const CylinderFunction&) = default;

 private:
  std::vector<CylinderAtom> atoms_;
};

// Candidate rules for the single letter slot carried by the early chain at a
// point x of Y_m. Only one of them makes the chain both unit-mass and a
// Markov chain; calibrate_slot_rule() finds it.
enum class SlotRule {
  FirstLetter,         // s = x_0
  InverseFirstLetter,  // s = x_0^-1
  NonCancelling,       // every s with s != x_0^-1 (three slots)
  AllSlots,            // all four slots
};

std::string to_string(SlotRule r);

// The early chain at time n < 0 under a given slot rule: value 4 * 3^-n on
// the selected slots over Y_{-n}.
CylinderFunction ancient_density(int n, SlotRule rule);
// Same, under the calibrated rule.
CylinderFunction ancient_density(int n);

struct SlotCalibration {
  SlotRule rule;
  std::vector<std::string> log;  // one line per candidate
};

// Checks every candidate rule for exact unit mass and exact chain steps on
// n_lo..n_hi (n_hi <= -2); returns the unique rule that passes. Throws
// std::logic_error if zero or several candidates pass.
SlotCalibration calibrate_slot_rule(int n_lo = -15, int n_hi = -2);
SlotRule calibrated_slot_rule();

// Exact Markov step. Throws BoundaryContact when an atom sits at depth 1.
CylinderFunction push_P_exact(const CylinderFunction& f);

// f(p, s); extends p's word as far as the prefixes require.
Rational eval_density(const CylinderFunction& f, BallPoint& p, Letter s);
double eval_density_double(const CylinderFunction& f, BallPoint& p, Letter s);

}  // namespace f2erg
