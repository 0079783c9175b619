#include "f2erg/cylinder.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "f2erg/errors.hpp"

namespace f2erg {

namespace {

ReducedWord append(const ReducedWord& p, Letter s) {
  std::vector<Letter> v(p.letters().begin(), p.letters().end());
  v.push_back(s);
  return ReducedWord::reduce(v);
}

ReducedWord prepend(Letter s, const ReducedWord& p) {
  std::vector<Letter> v{s};
  v.insert(v.end(), p.letters().begin(), p.letters().end());
  return ReducedWord::reduce(v);
}

ReducedWord drop_first(const ReducedWord& p) {
  return ReducedWord::reduce(p.letters().subspan(1));
}

ReducedWord parent_of(const ReducedWord& p) {
  return ReducedWord::reduce(p.letters().first(p.length() - 1));
}

std::vector<Letter> children_letters(const ReducedWord& p) {
  if (p.empty()) return {kLetters.begin(), kLetters.end()};
  const auto& row = kSuccessors[code(p.back())];
  return {row.begin(), row.end()};
}

bool starts_with(const ReducedWord& w, const ReducedWord& p) {
  if (p.length() > w.length()) return false;
  return std::equal(p.letters().begin(), p.letters().end(), w.letters().begin());
}

using Group = std::map<ReducedWord, Rational>;

// Splits every prefix that has a strict extension in the group into its
// children, so the remaining prefixes describe disjoint cylinders.
void make_disjoint(Group& g) {
  auto it = g.begin();
  while (it != g.end()) {
    auto next = std::next(it);
    if (next == g.end() || !starts_with(next->first, it->first)) {
      it = next;
      continue;
    }
    const ReducedWord p = it->first;
    const Rational v = it->second;
    g.erase(it);
    for (Letter s : children_letters(p)) g[append(p, s)] += v;
    it = g.lower_bound(p);
  }
}

// Merges complete sibling sets carrying equal values, longest first.
void coarsen(Group& g) {
  for (auto it = g.begin(); it != g.end();) {
    if (it->second == 0) {
      it = g.erase(it);
    } else {
      ++it;
    }
  }
  std::size_t max_len = 0;
  for (const auto& [p, v] : g) max_len = std::max(max_len, p.length());
  for (std::size_t len = max_len; len >= 1; --len) {
    bool merged = true;
    while (merged) {
      merged = false;
      for (const auto& [p, v] : g) {
        if (p.length() != len) continue;
        const ReducedWord parent = parent_of(p);
        const Rational value = v;
        bool complete = true;
        for (Letter s : children_letters(parent)) {
          auto c = g.find(append(parent, s));
          if (c == g.end() || c->second != value) {
            complete = false;
            break;
          }
        }
        if (!complete) continue;
        for (Letter s : children_letters(parent)) g.erase(append(parent, s));
        g[parent] = value;
        merged = true;
        break;
      }
    }
  }
}

Rational cylinder_probability(std::size_t len) {
  if (len == 0) return Rational(1);
  return Rational(1, 4) * pow3(-static_cast<long>(len - 1));
}

}  // namespace

Rational atom_mass(const CylinderAtom& atom) {
  return pow3(-atom.depth) * cylinder_probability(atom.prefix.length()) / 4;
}

CylinderFunction::CylinderFunction(std::vector<CylinderAtom> atoms) {
  std::map<std::pair<int, int>, Group> groups;
  for (auto& a : atoms) {
    if (a.depth < 1) throw DomainError("cylinder atoms must lie in the interior (depth >= 1)");
    if (a.value < 0) throw DomainError("cylinder values must be non-negative");
    groups[{a.depth, code(a.slot)}][a.prefix] += a.value;
  }
  for (auto& [key, g] : groups) {
    make_disjoint(g);
    coarsen(g);
    for (auto& [p, v] : g) atoms_.push_back(CylinderAtom{key.first, p, from_code(static_cast<unsigned>(key.second)), v});
  }
}

Rational CylinderFunction::l1_norm() const {
  Rational total = 0;
  for (const auto& a : atoms_) total += a.value * atom_mass(a);
  return total;
}

Rational CylinderFunction::support_mass() const {
  Rational total = 0;
  for (const auto& a : atoms_) total += atom_mass(a);
  return total;
}

int CylinderFunction::min_depth() const {
  int d = std::numeric_limits<int>::max();
  for (const auto& a : atoms_) d = std::min(d, a.depth);
  return d;
}

std::string CylinderFunction::serialize() const {
  std::ostringstream out;
  for (const auto& a : atoms_) {
    out << a.depth << ' ' << (a.prefix.empty() ? std::string("-") : a.prefix.str()) << ' ' << to_char(a.slot) << ' '
        << to_string(a.value) << '\n';
  }
  return out.str();
}

CylinderFunction CylinderFunction::parse(const std::string& text) {
  std::istringstream in(text);
  std::vector<CylinderAtom> atoms;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    int depth = 0;
    std::string prefix, slot, value;
    if (!(fields >> depth >> prefix >> slot >> value) || slot.size() != 1) {
      throw DomainError("malformed cylinder record: '" + line + "'");
    }
    const ReducedWord w = prefix == "-" ? ReducedWord{} : ReducedWord::parse(prefix);
    if (w.length() != (prefix == "-" ? 0 : prefix.size())) throw DomainError("cylinder prefix is not reduced: " + prefix);
    atoms.push_back(CylinderAtom{depth, w, letter_from_char(slot[0]), parse_rational(value)});
  }
  return CylinderFunction(std::move(atoms));
}

std::string to_string(SlotRule r) {
  switch (r) {
    case SlotRule::FirstLetter: return "first-letter";
    case SlotRule::InverseFirstLetter: return "inverse-first-letter";
    case SlotRule::NonCancelling: return "non-cancelling";
    case SlotRule::AllSlots: return "all-slots";
  }
  return "?";
}

CylinderFunction ancient_density(int n, SlotRule rule) {
  if (n >= 0) throw DomainError("ancient_density is cylinder-exact only for n < 0");
  const int depth = -n;
  const Rational value = 4 * pow3(depth);
  std::vector<CylinderAtom> atoms;
  for (Letter first : kLetters) {
    const ReducedWord prefix = ReducedWord::reduce(std::span<const Letter>(&first, 1));
    for (Letter s : kLetters) {
      bool on = false;
      switch (rule) {
        case SlotRule::FirstLetter: on = s == first; break;
        case SlotRule::InverseFirstLetter: on = s == inverse(first); break;
        case SlotRule::NonCancelling: on = s != inverse(first); break;
        case SlotRule::AllSlots: on = true; break;
      }
      if (on) atoms.push_back(CylinderAtom{depth, prefix, s, value});
    }
  }
  return CylinderFunction(std::move(atoms));
}

SlotCalibration calibrate_slot_rule(int n_lo, int n_hi) {
  if (n_hi > -2 || n_lo > n_hi) throw DomainError("calibration range must satisfy n_lo <= n_hi <= -2");
  SlotCalibration out{SlotRule::FirstLetter, {}};
  std::vector<SlotRule> passing;
  for (SlotRule rule : {SlotRule::FirstLetter, SlotRule::InverseFirstLetter, SlotRule::NonCancelling,
                        SlotRule::AllSlots}) {
    bool unit_mass = true, chain = true;
    for (int n = n_lo; n <= n_hi; ++n) {
      const CylinderFunction f = ancient_density(n, rule);
      unit_mass = unit_mass && f.l1_norm() == 1;
      chain = chain && push_P_exact(f) == ancient_density(n + 1, rule);
    }
    out.log.push_back(to_string(rule) + ": unit-mass=" + (unit_mass ? "yes" : "no") +
                      " chain=" + (chain ? "yes" : "no"));
    if (unit_mass && chain) passing.push_back(rule);
  }
  if (passing.size() != 1) {
    throw std::logic_error("slot calibration found " + std::to_string(passing.size()) + " consistent rules");
  }
  out.rule = passing.front();
  return out;
}

SlotRule calibrated_slot_rule() {
  static const SlotRule rule = calibrate_slot_rule().rule;
  return rule;
}

CylinderFunction ancient_density(int n) { return ancient_density(n, calibrated_slot_rule()); }

CylinderFunction push_P_exact(const CylinderFunction& f) {
  std::vector<CylinderAtom> out;
  for (const auto& atom : f.atoms()) {
    if (atom.depth <= 1) {
      throw BoundaryContact("atom at depth " + std::to_string(atom.depth) + " reaches the boundary in one step");
    }
    // Resolve the first letter so every source atom has a non-empty prefix.
    std::vector<ReducedWord> prefixes;
    if (atom.prefix.empty()) {
      for (Letter l : kLetters) prefixes.push_back(ReducedWord::reduce(std::span<const Letter>(&l, 1)));
    } else {
      prefixes.push_back(atom.prefix);
    }
    const Rational v = atom.value / 3;
    for (const auto& p : prefixes) {
      // (P f)(x, s) picks up f(y, t) / 3 for y = T_s^-1 x and t != s^-1.
      for (Letter s : kLetters) {
        if (s == inverse(atom.slot)) continue;
        if (s != inverse(p.front())) {
          out.push_back(CylinderAtom{atom.depth - 1, prepend(s, p), s, v});
        } else if (p.length() >= 2) {
          out.push_back(CylinderAtom{atom.depth + 1, drop_first(p), s, v});
        } else {
          for (Letter l : kSuccessors[code(p.front())]) {
            out.push_back(CylinderAtom{atom.depth + 1, ReducedWord::reduce(std::span<const Letter>(&l, 1)), s, v});
          }
        }
      }
    }
  }
  return CylinderFunction(std::move(out));
}

Rational eval_density(const CylinderFunction& f, BallPoint& p, Letter s) {
  Rational total = 0;
  if (!p.interior()) return total;
  for (const auto& a : f.atoms()) {
    if (a.depth != p.depth || a.slot != s) continue;
    bool match = true;
    for (std::size_t i = 0; i < a.prefix.length() && match; ++i) match = p.word.at(i) == a.prefix[i];
    if (match) total += a.value;
  }
  return total;
}

double eval_density_double(const CylinderFunction& f, BallPoint& p, Letter s) {
  return to_double(eval_density(f, p, s));
}

}  // namespace f2erg
