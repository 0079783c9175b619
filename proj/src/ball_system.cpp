#include "f2erg/ball_system.hpp"

#include <stdexcept>

namespace f2erg {

namespace {

constexpr std::uint64_t kTailTag = 0x7461696cULL;

}  // namespace

std::string to_string(Stratum s) {
  switch (s) {
    case Stratum::Interior: return "interior";
    case Stratum::BoundaryA: return "X_a";
    case Stratum::BoundaryB: return "X_b";
  }
  return "?";
}

bool BallPoint::same_as(BallPoint& other) {
  if (stratum != other.stratum) return false;
  if (stratum == Stratum::Interior && depth != other.depth) return false;
  return word.same_as(other.word);
}

std::string BallPoint::describe(std::size_t letters) {
  std::string s = to_string(stratum);
  if (interior()) s += "(" + std::to_string(depth) + ")";
  return s + ":" + word.prefix_string(letters) + "...";
}

LazyWord reflect(LazyWord w) {
  w.reflect();
  return w;
}

void BallSystem::apply_shift(BallPoint& p, Letter s) const {
  switch (p.stratum) {
    case Stratum::Interior: {
      if (s == inverse(p.word.front())) {
        p.word.drop_front();
        ++p.depth;
        return;
      }
      p.word.prepend(s);
      if (--p.depth > 0) return;
      // Landed on Y_0: pass to the canonical representative of the class.
      p.depth = 0;
      p.stratum = is_a_type(s) ? Stratum::BoundaryB : Stratum::BoundaryA;
      if (!is_positive(s)) p.word.reflect();
      return;
    }
    case Stratum::BoundaryB: {
      // T_b is the identity on X_b; T_a^{+-1} lift and cancel into Y_1.
      if (!is_a_type(s)) return;
      if (s == Letter::a) p.word.reflect();
      p.word.drop_front();
      p.stratum = Stratum::Interior;
      p.depth = 1;
      return;
    }
    case Stratum::BoundaryA: {
      if (is_a_type(s)) {
        p.word.odometer(s == Letter::a ? +1 : -1, carry_bound_);
        return;
      }
      if (s == Letter::b) p.word.reflect();
      p.word.drop_front();
      p.stratum = Stratum::Interior;
      p.depth = 1;
      return;
    }
  }
}

void BallSystem::apply_word(BallPoint& p, const ReducedWord& w) const {
  for (std::size_t i = w.length(); i-- > 0;) apply_shift(p, w[i]);
}

BallPoint BallSystem::sample_interior(int depth, CounterRng& rng) const {
  if (depth < 1) throw std::invalid_argument("interior depth must be >= 1");
  return BallPoint{Stratum::Interior, depth, LazyWord::sample(derive_key(rng(), kTailTag))};
}

BallPoint BallSystem::sample_boundary(Stratum which, CounterRng& rng) const {
  if (which == Stratum::Interior) throw std::invalid_argument("sample_boundary needs a boundary stratum");
  const Letter first = which == Stratum::BoundaryA ? Letter::b : Letter::a;
  return BallPoint{which, 0, LazyWord::starting_with(first, derive_key(rng(), kTailTag))};
}

BallPoint BallSystem::sample_point(CounterRng& rng) const {
  switch (rng.below(4)) {
    case 0: return sample_boundary(Stratum::BoundaryA, rng);
    case 1: return sample_boundary(Stratum::BoundaryB, rng);
    default: {
      int depth = 1;
      while (rng.below(3) == 0) ++depth;
      return sample_interior(depth, rng);
    }
  }
}

DigitStream digit_stream(BallPoint& p, std::size_t digits) {
  std::vector<std::uint8_t> d(digits);
  for (std::size_t i = 0; i < digits; ++i) d[i] = static_cast<std::uint8_t>(p.word.digit(i));
  return DigitStream(std::move(d));
}

AxiomReport axiom_survey(const BallSystem& sys, std::size_t samples, std::uint64_t seed) {
  AxiomReport r;
  r.samples = samples;
  r.pushed_masses.assign(4, {0.0, 0.0, 0.0});
  std::array<std::array<std::size_t, 3>, 4> pushed{};
  const CounterRng root(derive_key(seed, 0x6178696f6dULL));
  for (std::size_t i = 0; i < samples; ++i) {
    CounterRng rng = root.fork(i);
    BallPoint p = sys.sample_point(rng);
    auto moved = [&](Letter s) {
      BallPoint q = p;
      sys.apply_shift(q, s);
      return q;
    };
    switch (p.stratum) {
      case Stratum::Interior:
        ++r.interior;
        if (p.depth == 1) ++r.depth_one;
        break;
      case Stratum::BoundaryA: {
        ++r.boundary_a;
        if (!moved(Letter::a).in_Xa() || !moved(Letter::A).in_Xa()) ++r.invariance_a;
        if (!moved(Letter::b).interior() || !moved(Letter::B).interior()) ++r.inclusion_0;
        break;
      }
      case Stratum::BoundaryB: {
        ++r.boundary_b;
        if (!moved(Letter::b).in_Xb() || !moved(Letter::B).in_Xb()) ++r.invariance_b;
        BallPoint q = moved(Letter::a);
        if (!(q.interior() && q.depth == 1)) ++r.xb_to_y1;
        BallPoint back = q, fwd = q;
        sys.apply_shift(back, Letter::B);  // q in T_b X_a  iff  T_b^-1 q in X_a
        sys.apply_shift(fwd, Letter::b);   // q in T_b^-1 X_a  iff  T_b q in X_a
        if (!back.in_Xa() && !fwd.in_Xa()) ++r.inclusion_ab;
        break;
      }
    }
    for (Letter s : kLetters) {
      BallPoint q = moved(s);
      ++pushed[code(s)][static_cast<std::size_t>(q.stratum)];
      sys.apply_shift(q, inverse(s));
      if (!q.same_as(p)) ++r.invertibility;
    }
  }
  for (std::size_t s = 0; s < 4; ++s) {
    for (std::size_t k = 0; k < 3; ++k) {
      r.pushed_masses[s][k] = static_cast<double>(pushed[s][k]) / static_cast<double>(samples);
    }
  }
  return r;
}

}  // namespace f2erg
